#include <doctest.h>

#include <cmath>

#include "frfid/estimators.hpp"
#include "frfid/excitation.hpp"
#include "frfid/plantsim.hpp"
#include "helpers.hpp"

using namespace frfid;

namespace {

struct SimData {
    FrequencyGrid grid;
    Spectrum u_fast;
    Spectrum y_slow;
    TransferFunction plant;
};

SimData simulate_case(std::size_t n, std::size_t f, std::uint64_t seed,
                      bool steady_state) {
    SimData d;
    d.grid = FrequencyGrid::create(n, f, 1.0 / 128.0);
    ExcitationSpec spec;
    spec.grid = d.grid;
    spec.excited_bins = full_spectrum_bins(d.grid);
    spec.seed = seed;
    const auto rec = random_phase_multisine(spec);
    d.plant = TransferFunction::create({0.2, 0.1}, {1.0, -1.1, 0.4}, d.grid.fast_dt);
    const auto y_fast = steady_state ? simulate_steady_state(d.plant, rec.samples)
                                     : simulate_lti(d.plant, rec.samples);
    d.u_fast = rec.spectrum;
    d.y_slow = dft(slow_sample(y_fast, f), Rate::slow);
    return d;
}

}  // namespace

TEST_CASE("config constraint enumeration") {
    LpmConfig cfg;  // R = 2, nw = 150, F = 4
    CHECK(cfg.parameter_count() == 15);
    CHECK(cfg.window_size() == 301);
    CHECK(cfg.violations(3600).empty());

    // Window too small for the parameter count: 2*6+1 = 13 < 15.
    LpmConfig narrow = cfg;
    narrow.half_width = 6;
    CHECK_FALSE(narrow.violations(3600).empty());
    CHECK_THROWS_AS(narrow.validate(3600), std::invalid_argument);

    // Window as wide as the whole slow grid: 2nw+1 = M+1 violates M+1 > 2nw+1.
    CHECK_FALSE(cfg.violations(300).empty());
    CHECK(cfg.violations(302).empty());
}

TEST_CASE("regression dimensions follow (R+1)(F+1) x (2nw+1)") {
    const auto d = simulate_case(256, 4, 1, false);
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 7;  // square system at the Theorem-1 lower bound
    auto reg = build_regression(d.u_fast, d.y_slow, 20, cfg);
    CHECK(reg.K.rows() == 15);
    CHECK(reg.K.cols() == 15);
    CHECK(reg.y.cols() == 15);

    cfg.half_width = 25;
    reg = build_regression(d.u_fast, d.y_slow, 20, cfg);
    CHECK(reg.K.rows() == 15);
    CHECK(reg.K.cols() == 51);
}

TEST_CASE("solve recovers an exactly polynomial local model") {
    const auto d = simulate_case(256, 4, 2, false);
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 12;
    auto reg = build_regression(d.u_fast, d.y_slow, 33, cfg);

    Rng rng(17);
    Eigen::RowVectorXcd truth(reg.K.rows());
    for (Eigen::Index i = 0; i < truth.size(); ++i)
        truth(i) = cplx{rng.gauss(), rng.gauss()};
    reg.y = truth * reg.K;

    const auto est = solve_local(reg, cfg);
    REQUIRE(est.valid);
    CHECK(est.rank == reg.K.rows());
    CHECK((est.theta - truth).norm() < 1e-9 * truth.norm());
    CHECK(est.residual.norm() < 1e-9 * reg.y.norm());
}

TEST_CASE("solution satisfies the normal equations") {
    const auto d = simulate_case(512, 4, 3, false);
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 20;
    const auto reg = build_regression(d.u_fast, d.y_slow, 130, cfg);
    const auto est = solve_local(reg, cfg);
    REQUIRE(est.valid);
    const Eigen::RowVectorXcd lhs = est.theta * (reg.K * reg.K.adjoint());
    const Eigen::RowVectorXcd rhs = reg.y * reg.K.adjoint();
    CHECK((lhs - rhs).norm() < 1e-8 * rhs.norm());
}

TEST_CASE("variance uses the residual degrees of freedom") {
    LpmConfig cfg;  // nw = 150, R = 2, F = 4: dof = 301 - 15 = 286
    LocalEstimate est;
    est.valid = true;
    est.s_norm2 = 2.0;
    est.residual = Eigen::RowVectorXcd::Constant(301, cplx{1.0, 1.0});
    const auto v = estimate_variance(est, cfg);
    CHECK(v.noise_var == doctest::Approx(602.0 / 286.0).epsilon(1e-14));
    CHECK(v.published == doctest::Approx(4.0 * 2.0 * 602.0 / 286.0).epsilon(1e-14));
    CHECK(v.alt == doctest::Approx(16.0 * 2.0 * 602.0 / 286.0).epsilon(1e-14));

    LpmConfig square = cfg;
    square.half_width = 7;  // width equals parameter count
    CHECK_THROWS_AS(estimate_variance(est, square), std::invalid_argument);

    LocalEstimate bad;
    bad.valid = false;
    CHECK_THROWS_AS(estimate_variance(bad, cfg), std::invalid_argument);
}

TEST_CASE("F = 1 reduces to the classical single-rate estimator") {
    const auto d = simulate_case(256, 1, 4, false);
    LpmConfig cfg;
    cfg.factor = 1;
    cfg.poly_order = 2;
    cfg.half_width = 10;
    const auto multiband = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, cfg);
    const auto classical =
        testutil::classical_lpm(d.u_fast, d.y_slow, 2, 10, true);
    for (std::size_t k = 0; k < 256; ++k) {
        REQUIRE(multiband.bin_valid(k));
        CHECK(std::abs(multiband.frf[k] - classical[k]) <
              1e-12 * (1.0 + std::abs(classical[k])));
    }
}

TEST_CASE("normalized and raw polynomial bases give the same estimate") {
    const auto d = simulate_case(512, 4, 5, true);
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 15;
    auto raw = cfg;
    raw.normalize_basis = false;
    const auto a = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, cfg);
    const auto b = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, raw);
    for (std::size_t k = 0; k < 512; ++k) {
        REQUIRE(a.bin_valid(k));
        REQUIRE(b.bin_valid(k));
        CHECK(std::abs(a.frf[k] - b.frf[k]) < 1e-9 * (1.0 + std::abs(a.frf[k])));
    }
}

TEST_CASE("interpolation bias shrinks as the polynomial order grows") {
    const auto d = simulate_case(2048, 4, 6, true);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t order = 0; order <= 2; ++order) {
        LpmConfig cfg;
        cfg.factor = 4;
        cfg.poly_order = order;
        cfg.half_width = 20;
        const auto est = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, cfg);
        double worst = 0.0;
        for (std::size_t k = 1; k < 2048; ++k) {
            if (!est.bin_valid(k)) continue;
            const cplx truth = d.plant.response(d.grid.omega(k));
            worst = std::max(worst, std::abs(est.frf[k] - truth) / std::abs(truth));
        }
        CHECK(worst < previous);
        previous = worst;
    }
    CHECK(previous < 1e-2);
}

TEST_CASE("grid sweep is deterministic across thread counts") {
    const auto d = simulate_case(512, 4, 7, false);
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 15;
    const auto one = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, cfg, 1);
    const auto many = estimate_frf_lpm(d.u_fast, d.y_slow, d.grid, cfg, 3);
    CHECK(one.frf == many.frf);
    CHECK(one.variance == many.variance);
    CHECK(one.flags == many.flags);
}

TEST_CASE("zero input flags every bin instead of fabricating values") {
    const auto d = simulate_case(256, 4, 8, false);
    Spectrum zero;
    zero.values.assign(256, cplx{0, 0});
    LpmConfig cfg;
    cfg.factor = 4;
    cfg.poly_order = 2;
    cfg.half_width = 12;
    const auto est = estimate_frf_lpm(zero, d.y_slow, d.grid, cfg);
    for (std::size_t k = 0; k < 256; ++k) {
        CHECK_FALSE(est.bin_valid(k));
        CHECK(std::isnan(est.frf[k].real()));
    }
}

TEST_CASE("sparse estimator is exact at unflagged excited bins") {
    const auto grid = FrequencyGrid::create(36, 3, 1.0 / 36.0);
    ExcitationSpec spec;
    spec.grid = grid;
    spec.excited_bins = sparse_multisine_bins(grid);
    spec.kind = ExcitationKind::sparse;
    spec.seed = 9;
    const auto rec = random_phase_multisine(spec);
    const auto plant =
        TransferFunction::create({0.3, 0.2}, {1.0, -0.9, 0.3}, grid.fast_dt);
    const auto y_fast = simulate_steady_state(plant, rec.samples);
    const auto y_slow = dft(slow_sample(y_fast, 3), Rate::slow);

    const auto est = estimate_sparse(rec.spectrum, y_slow, grid, spec.excited_bins);
    REQUIRE(est.bins == spec.excited_bins);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < est.bins.size(); ++i) {
        if (est.flags[i] != BinFlag::ok) continue;
        const cplx truth = plant.response(grid.omega(est.bins[i]));
        CHECK(std::abs(est.frf[i] - truth) < 1e-9 * (1.0 + std::abs(truth)));
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("etfe baseline divides the aliased output by the input") {
    const auto d = simulate_case(256, 4, 10, true);
    const auto est = etfe_baseline(d.u_fast, d.y_slow, d.grid);
    for (std::size_t k = 1; k < 256; ++k) {
        if (est.flags[k] != BinFlag::ok) continue;
        const cplx expected = d.y_slow.values[k % 64] / d.u_fast.values[k];
        CHECK(std::abs(est.frf[k] - expected) < 1e-12 * (1.0 + std::abs(expected)));
    }
    // DC is unexcited by the full-spectrum multisine and must be flagged.
    CHECK(est.flags[0] == BinFlag::zero_input);
}
