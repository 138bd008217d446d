#include "frfid/estimators.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace frfid {

std::vector<std::string> LpmConfig::violations(std::size_t slow_length) const {
    std::vector<std::string> errs;
    std::ostringstream os;
    const std::size_t width = window_size();
    const std::size_t params = parameter_count();
    if (width < params) {
        os << "window too small: 2*nw+1 = " << width << " < (F+1)(R+1) = " << params;
        errs.push_back(os.str());
        os.str("");
    }
    if (width >= slow_length + 1) {
        os << "window too large: 2*nw+1 = " << width << " must be < M+1 = "
           << slow_length + 1;
        errs.push_back(os.str());
        os.str("");
    }
    if (factor == 0) errs.emplace_back("downsampling factor F must be positive");
    if (!(rank_tol > 0.0)) errs.emplace_back("rank tolerance must be positive");
    return errs;
}

void LpmConfig::validate(std::size_t slow_length) const {
    const auto errs = violations(slow_length);
    if (errs.empty()) return;
    std::string msg = "invalid LPM config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw std::invalid_argument(msg);
}

Regression build_regression(const Spectrum& u_fast, const Spectrum& y_slow,
                            std::ptrdiff_t k, const LpmConfig& cfg) {
    const std::size_t r_count = cfg.window_size();
    const std::size_t orders = cfg.poly_order + 1;
    const std::size_t f = cfg.factor;
    const std::size_t p = cfg.parameter_count();
    const auto m = static_cast<std::ptrdiff_t>(y_slow.size());

    Regression reg;
    reg.center = k;
    reg.y.resize(static_cast<Eigen::Index>(r_count));
    reg.K.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(r_count));

    const double scale =
        (cfg.normalize_basis && cfg.half_width > 0)
            ? static_cast<double>(cfg.half_width)
            : 1.0;
    const auto nw = static_cast<std::ptrdiff_t>(cfg.half_width);
    for (std::ptrdiff_t r = -nw; r <= nw; ++r) {
        const auto col = static_cast<Eigen::Index>(r + nw);
        reg.y(col) = y_slow.at(k + r);
        const double rn = static_cast<double>(r) / scale;
        double power = 1.0;
        for (std::size_t s = 0; s < orders; ++s) {
            for (std::size_t band = 0; band < f; ++band) {
                const std::ptrdiff_t bin =
                    k + r + static_cast<std::ptrdiff_t>(band) * m;
                reg.K(static_cast<Eigen::Index>(s * f + band), col) =
                    power * u_fast.at(bin);
            }
            reg.K(static_cast<Eigen::Index>(orders * f + s), col) = power;
            power *= rn;
        }
    }
    return reg;
}

LocalEstimate solve_local(const Regression& reg, const LpmConfig& cfg) {
    const auto p = reg.K.rows();
    LocalEstimate est;
    est.center = reg.center;

    // One SVD K = U S V^H serves the solve, the variance gain S and the
    // conditioning diagnostics; equivalent to Theta = y K^H (K K^H)^{-1}.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
        reg.K, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double cutoff = cfg.rank_tol * smax;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++rank;
    est.rank = rank;
    est.condition = (sv(sv.size() - 1) > 0.0)
                        ? smax / sv(sv.size() - 1)
                        : std::numeric_limits<double>::infinity();
    if (rank < p) {
        est.valid = false;
        return est;
    }

    // Theta = y V S^{-1} U^H;  S_gain = V S^{-1} U^H e1.
    const Eigen::VectorXcd yv = (reg.y * svd.matrixV()).transpose();
    Eigen::VectorXcd w(p);
    for (Eigen::Index i = 0; i < p; ++i) w(i) = yv(i) / sv(i);
    est.theta = (svd.matrixU() * w.conjugate()).adjoint();  // = w^T U^H

    Eigen::VectorXcd u1 = svd.matrixU().row(0).adjoint();  // U^H e1
    double s_norm2 = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        const double g = std::abs(u1(i)) / sv(i);
        s_norm2 += g * g;  // ||V S^{-1} U^H e1||^2, V unitary
    }
    est.s_norm2 = s_norm2;
    est.residual = reg.y - est.theta * reg.K;
    est.valid = true;
    return est;
}

VarianceEstimate estimate_variance(const LocalEstimate& local, const LpmConfig& cfg) {
    const std::size_t width = cfg.window_size();
    const std::size_t params = cfg.parameter_count();
    if (width <= params)
        throw std::invalid_argument(
            "estimate_variance: zero degrees of freedom (2nw+1 must exceed (R+1)(F+1))");
    if (!local.valid)
        throw std::invalid_argument("estimate_variance: local estimate is invalid");
    VarianceEstimate v;
    const double dof = static_cast<double>(width - params);
    v.noise_var = local.residual.squaredNorm() / dof;
    v.s_norm2 = local.s_norm2;
    const double f = static_cast<double>(cfg.factor);
    v.published = f * v.s_norm2 * v.noise_var;
    v.alt = f * f * v.s_norm2 * v.noise_var;
    return v;
}

FrfEstimate estimate_frf_lpm(const Spectrum& u_fast, const Spectrum& y_slow,
                             const FrequencyGrid& grid, const LpmConfig& cfg,
                             unsigned threads) {
    if (u_fast.size() != grid.fast_length)
        throw std::invalid_argument("estimate_frf_lpm: input length does not match grid");
    if (y_slow.size() != grid.slow_length)
        throw std::invalid_argument("estimate_frf_lpm: output length does not match grid");
    if (cfg.factor != grid.factor)
        throw std::invalid_argument("estimate_frf_lpm: config factor does not match grid");
    cfg.validate(grid.slow_length);

    const std::size_t n = grid.fast_length;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    FrfEstimate out;
    out.grid = grid;
    out.config = cfg;
    out.frf.assign(n, cplx{nan, nan});
    out.transient.assign(n, cplx{nan, nan});
    out.variance.assign(n, nan);
    out.variance_alt.assign(n, nan);
    out.noise_var.assign(n, nan);
    out.condition.assign(n, nan);
    out.flags.assign(n, BinFlag::ok);

    const Eigen::Index t_index =
        static_cast<Eigen::Index>((cfg.poly_order + 1) * cfg.factor);
    const double f = static_cast<double>(cfg.factor);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const auto reg =
                build_regression(u_fast, y_slow, static_cast<std::ptrdiff_t>(k), cfg);
            const auto local = solve_local(reg, cfg);
            out.condition[k] = local.condition;
            if (!local.valid) {
                out.flags[k] = BinFlag::rank_deficient;
                continue;
            }
            out.frf[k] = f * local.theta(0);
            out.transient[k] = local.theta(t_index);
            const auto var = estimate_variance(local, cfg);
            out.variance[k] = var.published;
            out.variance_alt[k] = var.alt;
            out.noise_var[k] = var.noise_var;
        }
    };

    if (threads <= 1) {
        work(0, n);
    } else {
        // Disjoint output slots per bin, shared immutable inputs: results are
        // bit-identical for any chunking.
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

SparseEstimate estimate_sparse(const Spectrum& u_fast, const Spectrum& y_slow,
                               const FrequencyGrid& grid,
                               std::span<const std::size_t> bins,
                               double input_floor) {
    if (u_fast.size() != grid.fast_length || y_slow.size() != grid.slow_length)
        throw std::invalid_argument("estimate_sparse: record lengths do not match grid");
    double umax = 0.0;
    for (const auto& v : u_fast.values) umax = std::max(umax, std::abs(v));
    const double floor = input_floor * std::max(umax, 1.0);

    const std::size_t m = grid.slow_length;
    const double f = static_cast<double>(grid.factor);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    SparseEstimate out;
    out.bins.assign(bins.begin(), bins.end());
    out.frf.assign(bins.size(), cplx{nan, nan});
    out.flags.assign(bins.size(), BinFlag::ok);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const std::size_t k = bins[i] % grid.fast_length;
        const cplx uk = u_fast.values[k];
        if (std::abs(uk) <= floor) {
            out.flags[i] = BinFlag::zero_input;
            continue;
        }
        // Single-contribution check: no other band of this slow bin excited.
        for (std::size_t band = 1; band < grid.factor; ++band) {
            const std::size_t other = (k + band * m) % grid.fast_length;
            if (std::abs(u_fast.values[other]) > floor) {
                out.flags[i] = BinFlag::multi_contribution;
                break;
            }
        }
        out.frf[i] = f * y_slow.values[k % m] / uk;
    }
    return out;
}

EtfeEstimate etfe_baseline(const Spectrum& u_fast, const Spectrum& y_slow,
                           const FrequencyGrid& grid, double input_floor) {
    if (u_fast.size() != grid.fast_length || y_slow.size() != grid.slow_length)
        throw std::invalid_argument("etfe_baseline: record lengths do not match grid");
    double umax = 0.0;
    for (const auto& v : u_fast.values) umax = std::max(umax, std::abs(v));
    const double floor = input_floor * std::max(umax, 1.0);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    EtfeEstimate out;
    out.frf.assign(grid.fast_length, cplx{nan, nan});
    out.flags.assign(grid.fast_length, BinFlag::ok);
    for (std::size_t k = 0; k < grid.fast_length; ++k) {
        if (std::abs(u_fast.values[k]) <= floor) {
            out.flags[k] = BinFlag::zero_input;
            continue;
        }
        out.frf[k] = y_slow.values[k % grid.slow_length] / u_fast.values[k];
    }
    return out;
}

}  // namespace frfid
