#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "frfid/spectra.hpp"

namespace frfid {

/// Settings of the multiband local polynomial estimator.
struct LpmConfig {
    std::size_t poly_order = 2;    ///< R
    std::size_t half_width = 150;  ///< nw, window is 2*nw+1 bins
    std::size_t factor = 4;        ///< F, number of aliased bands
    double rank_tol = 1e-10;       ///< relative singular value threshold
    bool normalize_basis = true;   ///< fit in powers of r/nw instead of r

    std::size_t parameter_count() const {
        return (poly_order + 1) * (factor + 1);
    }
    std::size_t window_size() const { return 2 * half_width + 1; }

    /// Enumerates every violated constraint for slow length M; empty means valid.
    std::vector<std::string> violations(std::size_t slow_length) const;
    /// Throws with all violations joined if invalid.
    void validate(std::size_t slow_length) const;
};

/// Local regression at one center bin: y is 1x(2nw+1), K is
/// (R+1)(F+1) x (2nw+1) with column r = [K1(r) (x) Ubar(k+r); K1(r)].
struct Regression {
    Eigen::RowVectorXcd y;
    Eigen::MatrixXcd K;
    std::ptrdiff_t center = 0;
};

/// Solution of one local window.
struct LocalEstimate {
    Eigen::RowVectorXcd theta;     ///< [theta_G | theta_g1..theta_gR | T | t_1..t_R]
    Eigen::RowVectorXcd residual;  ///< y - theta*K
    double condition = 0.0;        ///< sigma_max / sigma_min of K
    Eigen::Index rank = 0;
    std::ptrdiff_t center = 0;
    double s_norm2 = 0.0;          ///< S^H S with S = K^H (K K^H)^{-1} e1
    bool valid = false;
};

/// Variance of the local FRF estimate, both candidate scalings.
struct VarianceEstimate {
    double published = 0.0;  ///< F * S^H S * Cv
    double alt = 0.0;        ///< F^2 * S^H S * Cv
    double noise_var = 0.0;  ///< Cv, residual power / degrees of freedom
    double s_norm2 = 0.0;
};

/// Per-bin validity flags.
enum class BinFlag : std::uint8_t {
    ok = 0,
    zero_input = 1,        ///< input magnitude below floor
    rank_deficient = 2,    ///< regressor not full row rank
    multi_contribution = 3 ///< sparse single-contribution condition violated
};

/// Full-grid estimate with transient and variance.
struct FrfEstimate {
    FrequencyGrid grid;
    LpmConfig config;
    std::vector<cplx> frf;           ///< Ghat over k = 0..N-1
    std::vector<cplx> transient;     ///< That (aliased-transient average)
    std::vector<double> variance;     ///< published scaling (F)
    std::vector<double> variance_alt; ///< alternative scaling (F^2)
    std::vector<double> noise_var;    ///< Cv per bin
    std::vector<double> condition;
    std::vector<BinFlag> flags;

    bool bin_valid(std::size_t k) const { return flags[k] == BinFlag::ok; }
};

/// FRF values at the sparse excited set.
struct SparseEstimate {
    std::vector<std::size_t> bins;
    std::vector<cplx> frf;
    std::vector<BinFlag> flags;
};

/// Sparse-multisine estimate Ghat(k) = F * Yl(k mod M) / Uh(k) for k in the
/// excited set. Bins whose slow bin receives more than one excited fast bin
/// are flagged multi_contribution; bins with |Uh| below the floor are
/// flagged zero_input.
SparseEstimate estimate_sparse(const Spectrum& u_fast, const Spectrum& y_slow,
                               const FrequencyGrid& grid,
                               std::span<const std::size_t> bins,
                               double input_floor = 1e-12);

/// Assembles the local window regression at center bin k. Fast indices are
/// taken modulo N, slow indices modulo M.
Regression build_regression(const Spectrum& u_fast, const Spectrum& y_slow,
                            std::ptrdiff_t k, const LpmConfig& cfg);

/// Least-squares solve of one window by complete orthogonal decomposition;
/// mathematically Theta = y K^H (K K^H)^{-1} when K has full row rank.
LocalEstimate solve_local(const Regression& reg, const LpmConfig& cfg);

/// Residual-based variance of Ghat at the window center (both scalings).
/// Requires 2nw+1 > (R+1)(F+1); throws on zero degrees of freedom.
VarianceEstimate estimate_variance(const LocalEstimate& local, const LpmConfig& cfg);

/// Runs the per-bin loop over the whole fast grid. Deterministic for any
/// thread count; invalid bins carry flags rather than fabricated values.
FrfEstimate estimate_frf_lpm(const Spectrum& u_fast, const Spectrum& y_slow,
                             const FrequencyGrid& grid, const LpmConfig& cfg,
                             unsigned threads = 1);

/// Naive baseline Ghat(k) = Yl(k mod M) / Uh(k) over the fast grid; aliasing
/// is deliberately ignored, so the estimate is M-periodic in magnitude for
/// flat inputs. Zero-input bins are flagged.
struct EtfeEstimate {
    std::vector<cplx> frf;
    std::vector<BinFlag> flags;
};
EtfeEstimate etfe_baseline(const Spectrum& u_fast, const Spectrum& y_slow,
                           const FrequencyGrid& grid, double input_floor = 1e-12);

}  // namespace frfid
