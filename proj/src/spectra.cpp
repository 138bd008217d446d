#include "frfid/spectra.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace frfid {

namespace {

// FFTW plan creation is not thread-safe; execution of a plan on its own
// buffers is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<cplx> fft_raw(std::span<const cplx> in, int sign) {
    if (in.empty()) throw std::invalid_argument("dft: empty input");
    const auto n = in.size();
    std::vector<cplx> out(n);
    // fftw_complex is layout-compatible with std::complex<double>.
    auto* src = const_cast<fftw_complex*>(
        reinterpret_cast<const fftw_complex*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n), src, dst, sign,
                                FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    if (plan == nullptr) throw std::runtime_error("dft: fftw plan failed");
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

FrequencyGrid FrequencyGrid::create(std::size_t fast_length, std::size_t factor,
                                    double fast_dt) {
    if (fast_length == 0) throw std::invalid_argument("grid: N must be positive");
    if (factor == 0) throw std::invalid_argument("grid: F must be positive");
    if (fast_length % factor != 0)
        throw std::invalid_argument("grid: F must divide N");
    if (!(fast_dt > 0.0)) throw std::invalid_argument("grid: Tsh must be positive");
    FrequencyGrid g;
    g.fast_length = fast_length;
    g.slow_length = fast_length / factor;
    g.factor = factor;
    g.fast_dt = fast_dt;
    g.slow_dt = fast_dt * static_cast<double>(factor);
    return g;
}

double FrequencyGrid::omega(std::ptrdiff_t k) const {
    return 2.0 * std::numbers::pi * static_cast<double>(k) /
           (static_cast<double>(fast_length) * fast_dt);
}

double FrequencyGrid::hz(std::ptrdiff_t k) const {
    return static_cast<double>(k) /
           (static_cast<double>(fast_length) * fast_dt);
}

std::vector<double> FrequencyGrid::omega_values() const {
    std::vector<double> w(fast_length);
    for (std::size_t k = 0; k < fast_length; ++k)
        w[k] = omega(static_cast<std::ptrdiff_t>(k));
    return w;
}

std::vector<double> FrequencyGrid::hz_values() const {
    std::vector<double> f(fast_length);
    for (std::size_t k = 0; k < fast_length; ++k)
        f[k] = hz(static_cast<std::ptrdiff_t>(k));
    return f;
}

Spectrum dft(std::span<const double> signal, Rate rate) {
    std::vector<cplx> tmp(signal.begin(), signal.end());
    return Spectrum{fft_raw(tmp, FFTW_FORWARD), rate};
}

Spectrum dft(std::span<const cplx> signal, Rate rate) {
    return Spectrum{fft_raw(signal, FFTW_FORWARD), rate};
}

std::vector<cplx> idft(const Spectrum& spectrum) {
    auto out = fft_raw(spectrum.values, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<double> downsample(std::span<const double> signal, std::size_t factor) {
    if (factor == 0) throw std::invalid_argument("downsample: F must be positive");
    if (signal.empty()) throw std::invalid_argument("downsample: empty input");
    if (signal.size() % factor != 0)
        throw std::invalid_argument("downsample: F must divide the record length");
    std::vector<double> out(signal.size() / factor);
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = signal[m * factor];
    return out;
}

Spectrum alias_spectrum(const Spectrum& fast, std::size_t factor) {
    if (factor == 0) throw std::invalid_argument("alias_spectrum: F must be positive");
    const std::size_t n = fast.size();
    if (n == 0) throw std::invalid_argument("alias_spectrum: empty spectrum");
    if (n % factor != 0)
        throw std::invalid_argument("alias_spectrum: F must divide the record length");
    const std::size_t m = n / factor;
    Spectrum out;
    out.rate = Rate::slow;
    out.values.resize(m);
    const double scale = 1.0 / static_cast<double>(factor);
    for (std::size_t k = 0; k < m; ++k) {
        cplx acc = 0.0;
        for (std::size_t f = 0; f < factor; ++f) acc += fast.values[k + m * f];
        out.values[k] = acc * scale;
    }
    return out;
}

std::vector<cplx> gather_window(const Spectrum& spectrum, std::ptrdiff_t center,
                                std::size_t half_width) {
    const std::size_t width = 2 * half_width + 1;
    if (width > spectrum.size())
        throw std::invalid_argument("gather_window: window longer than the record");
    std::vector<cplx> out(width);
    for (std::size_t i = 0; i < width; ++i)
        out[i] = spectrum.at(center - static_cast<std::ptrdiff_t>(half_width) +
                             static_cast<std::ptrdiff_t>(i));
    return out;
}

}  // namespace frfid
