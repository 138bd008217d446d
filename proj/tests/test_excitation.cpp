#include <doctest.h>

#include <set>

#include "frfid/excitation.hpp"
#include "helpers.hpp"

using namespace frfid;

namespace {
ExcitationSpec basic_spec(std::size_t n, std::size_t f,
                          std::vector<std::size_t> bins, std::uint64_t seed = 1,
                          double rms = 1.0) {
    ExcitationSpec spec;
    spec.grid = FrequencyGrid::create(n, f, 0.01);
    spec.excited_bins = std::move(bins);
    spec.rms = rms;
    spec.seed = seed;
    return spec;
}

double record_rms(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}
}  // namespace

TEST_CASE("single excited bin gives a pure sinusoid at the target rms") {
    const auto rec = random_phase_multisine(basic_spec(32, 1, {3}, 5, 0.25));
    CHECK(record_rms(rec.samples) == doctest::Approx(0.25).epsilon(1e-12));
    // Spectrum nonzero only at bins 3 and 29.
    for (std::size_t k = 0; k < 32; ++k) {
        const double mag = std::abs(rec.spectrum.values[k]);
        if (k == 3 || k == 29)
            CHECK(mag > 0.0);
        else
            CHECK(mag < 1e-14);
    }
}

TEST_CASE("same spec and seed give bit-identical records") {
    const auto spec = basic_spec(256, 2, full_spectrum_bins(FrequencyGrid::create(256, 2, 0.01)), 9);
    const auto a = random_phase_multisine(spec);
    const auto b = random_phase_multisine(spec);
    CHECK(a.samples == b.samples);

    const auto c = random_phase_multisine(
        basic_spec(256, 2, spec.excited_bins, 10));
    CHECK(a.samples != c.samples);
}

TEST_CASE("flat amplitude across excited bins after scaling") {
    const auto grid = FrequencyGrid::create(4096, 4, 0.01);
    const auto rec =
        random_phase_multisine(basic_spec(4096, 4, full_spectrum_bins(grid), 3));
    double ref = std::abs(rec.spectrum.values[1]);
    for (std::size_t k = 1; 2 * k < 4096; ++k)
        CHECK(std::abs(rec.spectrum.values[k]) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("synthesized records are real and exactly rms-scaled") {
    const auto grid = FrequencyGrid::create(600, 4, 1.0 / 60.0);
    ExcitationSpec spec = basic_spec(600, 4, {}, 21, 8.3e-3);
    spec.excited_bins = sparse_multisine_bins(grid);
    spec.kind = ExcitationKind::sparse;
    const auto rec = random_phase_multisine(spec);
    CHECK(record_rms(rec.samples) == doctest::Approx(8.3e-3).epsilon(1e-12));
    // Conjugate symmetry of the spectrum certifies realness.
    const auto X = dft(rec.samples);
    for (std::size_t k = 1; k < 600; ++k)
        CHECK(std::abs(X.values[600 - k] - std::conj(X.values[k])) <
              1e-12 * std::abs(X.values[k]) + 1e-12);
}

TEST_CASE("empty excitation set is rejected") {
    CHECK_THROWS_AS(random_phase_multisine(basic_spec(64, 1, {})),
                    std::invalid_argument);
}

TEST_CASE("sparse set reproduces the F=3, M=12 enumeration") {
    const auto grid = FrequencyGrid::create(36, 3, 0.1);
    const auto s = sparse_multisine_bins(grid);
    CHECK(s == std::vector<std::size_t>{0, 3, 6, 13, 16, 19, 26, 29, 32});
    std::set<std::size_t> residues;
    for (auto b : s) residues.insert(b % 12);
    CHECK(residues ==
          std::set<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
}

TEST_CASE("sparse set with F=1 is the baseband half grid") {
    const auto grid = FrequencyGrid::create(8, 1, 0.1);
    CHECK(sparse_multisine_bins(grid) == std::vector<std::size_t>{0, 1, 2, 3, 4});
}

TEST_CASE("sparse set at full-scale dimensions: 4*451 bins, distinct mod M") {
    // j runs over {0, F, 2F, ..., M/2}: 451 values for M = 3600, F = 4,
    // replicated across the F aliased bands.
    const auto grid = FrequencyGrid::create(14400, 4, 1.0 / 120.0);
    const auto s = sparse_multisine_bins(grid);
    CHECK(s.size() == 1804);
    std::set<std::size_t> residues;
    for (auto b : s) residues.insert(b % 3600);
    CHECK(residues.size() == s.size());  // brute-force collision check
}

TEST_CASE("sparse set requires even M") {
    const auto grid = FrequencyGrid::create(27, 3, 0.1);  // M = 9
    CHECK_THROWS_AS(sparse_multisine_bins(grid), std::invalid_argument);
}

TEST_CASE("roughness check distinguishes random from degenerate inputs") {
    const auto grid = FrequencyGrid::create(256, 4, 0.01);
    const auto rec =
        random_phase_multisine(basic_spec(256, 4, full_spectrum_bins(grid), 2));

    const auto good = check_roughness(rec.spectrum, grid, 3, 17);
    CHECK(good.rough);
    CHECK(good.margin > 0.0);

    Spectrum zero;
    zero.values.assign(256, cplx{0, 0});
    const auto bad = check_roughness(zero, grid, 3, 17);
    CHECK_FALSE(bad.rough);
    CHECK(bad.margin == 0.0);

    Spectrum flat;  // equal values over one band's window
    flat = rec.spectrum;
    for (std::size_t i = 14; i <= 20; ++i) flat.values[i] = cplx{1.0, 0.0};
    const auto flagged = check_roughness(flat, grid, 3, 17);
    CHECK_FALSE(flagged.rough);
}
