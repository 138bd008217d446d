#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace frfid {

using cplx = std::complex<double>;

/// Sampling grid shared by the fast-rate and slow-rate records.
///
/// The fast record has N samples at spacing Tsh, the slow record M = N/F
/// samples at spacing Tsl = F*Tsh, so both share the frequency axis
/// Omega_k = 2*pi*k / (N*Tsh) = 2*pi*k / (M*Tsl).
struct FrequencyGrid {
    std::size_t fast_length = 0;  ///< N
    std::size_t slow_length = 0;  ///< M = N/F
    std::size_t factor = 1;       ///< F
    double fast_dt = 1.0;         ///< Tsh [s]
    double slow_dt = 1.0;         ///< Tsl = F*Tsh [s]

    /// Builds a grid from N, F and the fast sampling time; throws if F
    /// does not divide N or any quantity is non-positive.
    static FrequencyGrid create(std::size_t fast_length, std::size_t factor,
                                double fast_dt);

    double omega(std::ptrdiff_t k) const;  ///< Omega_k [rad/s]
    double hz(std::ptrdiff_t k) const;     ///< Omega_k / (2*pi) [Hz]

    std::vector<double> omega_values() const;  ///< k = 0..N-1
    std::vector<double> hz_values() const;
};

enum class Rate { fast, slow };

/// DFT coefficients of one finite record. Indexing is circular: index k is
/// interpreted modulo the record length, matching the periodicity of the DFT.
struct Spectrum {
    std::vector<cplx> values;
    Rate rate = Rate::fast;

    std::size_t size() const { return values.size(); }

    /// Circular access, valid for any integer k (including negative).
    cplx at(std::ptrdiff_t k) const {
        const auto n = static_cast<std::ptrdiff_t>(values.size());
        std::ptrdiff_t m = k % n;
        if (m < 0) m += n;
        return values[static_cast<std::size_t>(m)];
    }
};

/// Forward DFT, X(k) = sum_n x(n) exp(-j*2*pi*k*n/L). No 1/L scaling.
Spectrum dft(std::span<const double> signal, Rate rate = Rate::fast);
Spectrum dft(std::span<const cplx> signal, Rate rate = Rate::fast);

/// Inverse DFT with 1/L scaling, so idft(dft(x)) == x.
std::vector<cplx> idft(const Spectrum& spectrum);

/// Keeps every F-th sample: out[m] = in[m*F]. F must divide the length.
std::vector<double> downsample(std::span<const double> signal, std::size_t factor);

/// Frequency-domain image of downsampling:
/// out[k] = (1/F) * sum_f in[(k + M*f) mod N], M = N/F.
Spectrum alias_spectrum(const Spectrum& fast, std::size_t factor);

/// Circular window of 2*nw+1 values centered at bin k.
std::vector<cplx> gather_window(const Spectrum& spectrum, std::ptrdiff_t center,
                                std::size_t half_width);

}  // namespace frfid
