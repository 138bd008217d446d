#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frfid/spectra.hpp"

namespace frfid {

/// Rational discrete-time transfer function in z^{-1},
///   G(z) = (num[0] + num[1] z^{-1} + ...) / (den[0] + den[1] z^{-1} + ...),
/// with den[0] normalized to 1 on construction.
struct TransferFunction {
    std::vector<double> num{1.0};
    std::vector<double> den{1.0};
    double dt = 1.0;  ///< sampling time [s]

    static TransferFunction create(std::vector<double> num,
                                   std::vector<double> den, double dt);

    /// Pole magnitudes (roots of the denominator in z).
    std::vector<double> pole_magnitudes() const;

    /// True iff all poles are strictly inside the unit circle.
    bool is_stable() const;

    /// Largest pole magnitude; 0 for FIR.
    double spectral_radius() const;

    /// Exact frequency response at z = exp(j*omega*dt). Throws if the
    /// denominator vanishes there (pole on the unit circle).
    cplx response(double omega) const;
};

using PlantModel = TransferFunction;

/// Noise shaping filter at the slow rate plus the white-noise level.
struct NoiseModel {
    TransferFunction filter;  ///< H, runs at Tsl
    double sigma = 0.0;       ///< std of the driving white noise e
    std::uint64_t seed = 0;
};

/// Direct-form difference equation from zero initial state.
std::vector<double> simulate_lti(const TransferFunction& model,
                                 std::span<const double> input);

/// out[m] = y[m*F]; same contract as spectra downsample.
std::vector<double> slow_sample(std::span<const double> fast_record,
                                std::size_t factor);

/// y + H(q) e with e i.i.d. Gaussian(0, sigma^2), zero filter state.
/// If realization is non-null the filtered-noise record is stored there.
std::vector<double> add_noise(std::span<const double> slow_record,
                              const NoiseModel& noise,
                              std::vector<double>* realization = nullptr);

/// Number of leading periods to discard so the transient of a stable model
/// decays below ~1e-12 of its initial size within a record of period_length.
std::size_t steady_state_periods(const TransferFunction& model,
                                 std::size_t period_length);

/// Simulates enough periods of the periodic input and returns the last one,
/// i.e. one period of the steady-state response. Requires a stable model.
std::vector<double> simulate_steady_state(const TransferFunction& model,
                                          std::span<const double> input_period);

}  // namespace frfid
