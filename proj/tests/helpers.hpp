#pragma once

// Shared test utilities: independent oracles kept deliberately separate from
// the library implementation paths they check.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "frfid/estimators.hpp"
#include "frfid/rng.hpp"
#include "frfid/spectra.hpp"

namespace testutil {

using frfid::cplx;

/// Naive O(L^2) DFT straight from the definition; oracle for the FFT path.
inline std::vector<cplx> naive_dft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -2.0 * std::numbers::pi *
                               static_cast<double>(k) * static_cast<double>(i) /
                               static_cast<double>(n);
            acc += x[i] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

inline std::vector<cplx> naive_dft(const std::vector<double>& x) {
    std::vector<cplx> tmp(x.begin(), x.end());
    return naive_dft(tmp);
}

inline std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    frfid::Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gauss();
    return x;
}

/// Classical single-rate local polynomial FRF estimator, written directly
/// against the single-band model Y(k+r) = G(k+r) U(k+r) + T(k+r) with
/// polynomial G and T over the window. Independent of the multiband code;
/// the F = 1 reduction must reproduce it elementwise.
inline std::vector<cplx> classical_lpm(const frfid::Spectrum& u,
                                       const frfid::Spectrum& y,
                                       std::size_t poly_order,
                                       std::size_t half_width,
                                       bool normalize_basis = true) {
    const std::size_t n = u.size();
    const std::size_t width = 2 * half_width + 1;
    const std::size_t p = 2 * (poly_order + 1);
    const double scale =
        (normalize_basis && half_width > 0) ? static_cast<double>(half_width) : 1.0;
    std::vector<cplx> g(n);
    Eigen::MatrixXcd A(width, p);
    Eigen::VectorXcd b(width);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < width; ++i) {
            const auto r = static_cast<std::ptrdiff_t>(i) -
                           static_cast<std::ptrdiff_t>(half_width);
            const auto kk = static_cast<std::ptrdiff_t>(k) + r;
            const double rn = static_cast<double>(r) / scale;
            double power = 1.0;
            for (std::size_t s = 0; s <= poly_order; ++s) {
                A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) =
                    power * u.at(kk);
                A(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(poly_order + 1 + s)) = power;
                power *= rn;
            }
            b(static_cast<Eigen::Index>(i)) = y.at(kk);
        }
        const Eigen::VectorXcd theta = A.completeOrthogonalDecomposition().solve(b);
        g[k] = theta(0);
    }
    return g;
}

}  // namespace testutil
