#include "frfid/excitation.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "frfid/rng.hpp"

namespace frfid {

std::vector<std::size_t> full_spectrum_bins(const FrequencyGrid& grid) {
    std::vector<std::size_t> bins;
    for (std::size_t k = 1; 2 * k < grid.fast_length; ++k) bins.push_back(k);
    return bins;
}

std::vector<std::size_t> sparse_multisine_bins(const FrequencyGrid& grid) {
    const std::size_t m = grid.slow_length;
    const std::size_t f = grid.factor;
    const std::size_t n = grid.fast_length;
    if (m % 2 != 0)
        throw std::invalid_argument("sparse_multisine_bins: M must be even");
    std::vector<std::size_t> bins;
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = 0; j <= m / 2; j += f)
            bins.push_back((j + i * (m + 1)) % n);
    // Distinctness modulo M is what makes the aliasing sum collapse to a
    // single term per slow bin; a collision here is a bug.
    std::unordered_set<std::size_t> residues;
    for (auto b : bins)
        if (!residues.insert(b % m).second)
            throw std::logic_error("sparse_multisine_bins: modular collision");
    return bins;
}

ExcitationRecord random_phase_multisine(const ExcitationSpec& spec) {
    const std::size_t n = spec.grid.fast_length;
    if (spec.excited_bins.empty())
        throw std::invalid_argument("random_phase_multisine: empty excitation set");
    if (!(spec.rms > 0.0))
        throw std::invalid_argument("random_phase_multisine: rms must be positive");

    Rng rng(spec.seed);
    Spectrum x;
    x.rate = Rate::fast;
    x.values.assign(n, cplx{0.0, 0.0});
    const bool even = (n % 2 == 0);
    for (std::size_t raw : spec.excited_bins) {
        std::size_t b = raw % n;
        double ph = rng.phase();
        if (2 * b > n) {  // fold onto the conjugate bin
            b = n - b;
            ph = -ph;
        }
        const bool self_conjugate = (b == 0) || (even && 2 * b == n);
        if (x.values[b] != cplx{0.0, 0.0})
            throw std::invalid_argument(
                "random_phase_multisine: bin excited twice after folding");
        if (self_conjugate) {
            // DC and Nyquist must be real; the phase draw picks the sign.
            x.values[b] = (ph < 3.141592653589793) ? 1.0 : -1.0;
        } else {
            x.values[b] = std::polar(1.0, ph);
            x.values[n - b] = std::polar(1.0, -ph);
        }
    }

    auto time = idft(x);
    ExcitationRecord rec;
    rec.samples.resize(n);
    double sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rec.samples[i] = time[i].real();
        sumsq += rec.samples[i] * rec.samples[i];
    }
    const double rms = std::sqrt(sumsq / static_cast<double>(n));
    if (!(rms > 0.0))
        throw std::invalid_argument("random_phase_multisine: zero-power record");
    const double scale = spec.rms / rms;
    for (auto& s : rec.samples) s *= scale;
    for (auto& v : x.values) v *= scale;
    rec.spectrum = std::move(x);
    return rec;
}

RoughnessReport check_roughness(const Spectrum& u_fast, const FrequencyGrid& grid,
                                std::size_t half_width, std::ptrdiff_t k,
                                double floor) {
    const std::size_t width = 2 * half_width + 1;
    RoughnessReport rep;
    rep.margin = std::numeric_limits<double>::infinity();
    for (std::size_t band = 0; band < grid.factor; ++band) {
        const std::ptrdiff_t base =
            k + static_cast<std::ptrdiff_t>(band * grid.slow_length);
        auto win = gather_window(u_fast, base, half_width);
        for (std::size_t a = 0; a < width; ++a)
            for (std::size_t b = a + 1; b < width; ++b)
                rep.margin = std::min(rep.margin, std::abs(win[a] - win[b]));
    }
    if (!std::isfinite(rep.margin)) rep.margin = 0.0;  // degenerate window
    rep.rough = rep.margin > floor;
    return rep;
}

void write_record_csv(const std::string& path, std::span<const double> samples,
                      double dt) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr)
        throw std::runtime_error("write_record_csv: cannot open " + path);
    std::fputs("sample_index,time_s,value\n", f);
    for (std::size_t i = 0; i < samples.size(); ++i)
        std::fprintf(f, "%zu,%.17g,%.17g\n", i, static_cast<double>(i) * dt,
                     samples[i]);
    std::fclose(f);
}

}  // namespace frfid
