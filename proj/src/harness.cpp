#include "frfid/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "frfid/rng.hpp"

namespace frfid {

namespace fs = std::filesystem;
using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::lpm: return "lpm";
        case Method::sparse: return "sparse";
        case Method::etfe: return "etfe";
    }
    throw std::logic_error("method_name: unknown method");
}

Method method_from_name(const std::string& name) {
    if (name == "lpm") return Method::lpm;
    if (name == "sparse") return Method::sparse;
    if (name == "etfe") return Method::etfe;
    throw std::invalid_argument("unknown method: " + name +
                                " (expected lpm, sparse or etfe)");
}

namespace {

// Bilinear transform of one quadratic s^2 + a*s + b with prewarp-free
// mapping s = (2/dt)(1 - z^{-1})/(1 + z^{-1}); returns the z^{-1} polynomial
// coefficients over the common (1+z^{-1})^2 denominator.
std::array<double, 3> bilinear_quadratic(double a, double b, double dt) {
    const double K = 2.0 / dt;
    return {K * K + a * K + b, 2.0 * b - 2.0 * K * K, K * K - a * K + b};
}

std::vector<double> conv(std::span<const double> x, std::span<const double> y) {
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TransferFunction resonant_plant(double dt, double pole1_hz, double pole2_hz,
                                double zero1_hz, double zero2_hz,
                                double pole_damping, double zero_damping) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto section = [&](double f_hz, double zeta, double dt_) {
        const double w = two_pi * f_hz;
        return bilinear_quadratic(2.0 * zeta * w, w * w, dt_);
    };
    const auto z1 = section(zero1_hz, zero_damping, dt);
    const auto z2 = section(zero2_hz, zero_damping, dt);
    const auto p1 = section(pole1_hz, pole_damping, dt);
    const auto p2 = section(pole2_hz, pole_damping, dt);
    std::vector<double> num = conv(z1, z2);
    std::vector<double> den = conv(p1, p2);
    // Unit gain at z = 1.
    double ns = 0.0, ds = 0.0;
    for (double c : num) ns += c;
    for (double c : den) ds += c;
    for (double& c : num) c *= ds / ns;
    return TransferFunction::create(std::move(num), std::move(den), dt);
}

ExperimentConfig::ExperimentConfig() {
    plant = resonant_plant(1.0 / fs_fast);
    noise.filter = TransferFunction::create(
        {1.0}, {1.0}, static_cast<double>(factor) / fs_fast);
}

std::size_t ExperimentConfig::fast_length() const {
    const double n = fs_fast * measurement_time;
    const double rounded = std::round(n);
    if (!(n > 0.0) || std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
        throw std::invalid_argument("config: fs_h * T_m must be a positive integer");
    return static_cast<std::size_t>(rounded);
}

FrequencyGrid ExperimentConfig::grid() const {
    return FrequencyGrid::create(fast_length(), factor, 1.0 / fs_fast);
}

ExperimentConfig ExperimentConfig::from_ini(const io::IniFile& ini) {
    ExperimentConfig cfg;
    cfg.fs_fast = ini.get_double("grid.fs_h");
    cfg.factor = static_cast<std::size_t>(ini.get_int("grid.factor"));
    cfg.measurement_time = ini.get_double("grid.measurement_time");

    const double dt = 1.0 / cfg.fs_fast;
    const std::string preset = ini.get_or(
        "plant.preset", ini.has("plant.num") ? "coefficients" : "resonant");
    if (preset == "resonant") {
        cfg.plant = resonant_plant(
            dt, ini.has("plant.pole1_hz") ? ini.get_double("plant.pole1_hz") : 8.0,
            ini.has("plant.pole2_hz") ? ini.get_double("plant.pole2_hz") : 45.0,
            ini.has("plant.zero1_hz") ? ini.get_double("plant.zero1_hz") : 12.0,
            ini.has("plant.zero2_hz") ? ini.get_double("plant.zero2_hz") : 30.0,
            ini.has("plant.pole_damping") ? ini.get_double("plant.pole_damping") : 0.35,
            ini.has("plant.zero_damping") ? ini.get_double("plant.zero_damping") : 0.45);
    } else if (preset == "coefficients") {
        cfg.plant = TransferFunction::create(ini.get_doubles("plant.num"),
                                             ini.get_doubles("plant.den"), dt);
    } else {
        throw std::invalid_argument("config: unknown plant.preset " + preset);
    }

    const double slow_dt = dt * static_cast<double>(cfg.factor);
    if (ini.has("noise.num") || ini.has("noise.den")) {
        cfg.noise.filter = TransferFunction::create(
            ini.has("noise.num") ? ini.get_doubles("noise.num") : std::vector<double>{1.0},
            ini.has("noise.den") ? ini.get_doubles("noise.den") : std::vector<double>{1.0},
            slow_dt);
    } else {
        cfg.noise.filter = TransferFunction::create({1.0}, {1.0}, slow_dt);
    }
    cfg.noise.sigma = ini.has("noise.sigma") ? ini.get_double("noise.sigma") : 0.0;

    const std::string kind = ini.get_or("excitation.kind", "full");
    if (kind == "full") cfg.excitation_kind = ExcitationKind::full_spectrum;
    else if (kind == "sparse") cfg.excitation_kind = ExcitationKind::sparse;
    else throw std::invalid_argument("config: unknown excitation.kind " + kind);
    cfg.excitation_rms = ini.has("excitation.rms") ? ini.get_double("excitation.rms") : 8.3e-3;
    cfg.excitation_seed = ini.has("excitation.seed")
                              ? static_cast<std::uint64_t>(ini.get_int("excitation.seed"))
                              : 1;

    cfg.lpm.poly_order = ini.has("lpm.poly_order")
                             ? static_cast<std::size_t>(ini.get_int("lpm.poly_order")) : 2;
    cfg.lpm.half_width = ini.has("lpm.half_width")
                             ? static_cast<std::size_t>(ini.get_int("lpm.half_width")) : 150;
    cfg.lpm.factor = cfg.factor;
    cfg.lpm.rank_tol = ini.has("lpm.rank_tol") ? ini.get_double("lpm.rank_tol") : 1e-10;
    cfg.lpm.normalize_basis =
        ini.has("lpm.normalize_basis") ? ini.get_bool("lpm.normalize_basis") : true;

    if (ini.has("run.methods")) {
        cfg.methods.clear();
        for (const auto& m : ini.get_list("run.methods"))
            cfg.methods.insert(method_from_name(m));
    }
    cfg.montecarlo_runs = ini.has("run.montecarlo_runs")
                              ? static_cast<std::size_t>(ini.get_int("run.montecarlo_runs")) : 0;
    cfg.master_seed = ini.has("run.master_seed")
                          ? static_cast<std::uint64_t>(ini.get_int("run.master_seed")) : 1;
    cfg.out_dir = ini.get_or("run.out_dir", "out");
    cfg.threads =
        ini.has("run.threads") ? static_cast<unsigned>(ini.get_int("run.threads")) : 1;
    if (ini.has("run.input_csv")) cfg.input_csv = ini.get("run.input_csv");
    if (ini.has("run.output_csv")) cfg.output_csv = ini.get("run.output_csv");
    return cfg;
}

io::IniFile ExperimentConfig::to_ini() const {
    io::IniFile ini;
    ini.set_double("grid.fs_h", fs_fast);
    ini.set_int("grid.factor", static_cast<long long>(factor));
    ini.set_double("grid.measurement_time", measurement_time);

    auto join = [](std::span<const double> v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
            s += buf;
            if (i + 1 < v.size()) s += ", ";
        }
        return s;
    };
    ini.set("plant.preset", "coefficients");
    ini.set("plant.num", join(plant.num));
    ini.set("plant.den", join(plant.den));
    ini.set("noise.num", join(noise.filter.num));
    ini.set("noise.den", join(noise.filter.den));
    ini.set_double("noise.sigma", noise.sigma);
    ini.set("excitation.kind",
            excitation_kind == ExcitationKind::full_spectrum ? "full" : "sparse");
    ini.set_double("excitation.rms", excitation_rms);
    ini.set_int("excitation.seed", static_cast<long long>(excitation_seed));
    ini.set_int("lpm.poly_order", static_cast<long long>(lpm.poly_order));
    ini.set_int("lpm.half_width", static_cast<long long>(lpm.half_width));
    ini.set_double("lpm.rank_tol", lpm.rank_tol);
    ini.set("lpm.normalize_basis", lpm.normalize_basis ? "true" : "false");
    std::string ms;
    for (const auto& m : methods) {
        if (!ms.empty()) ms += ", ";
        ms += method_name(m);
    }
    ini.set("run.methods", ms);
    ini.set_int("run.montecarlo_runs", static_cast<long long>(montecarlo_runs));
    ini.set_int("run.master_seed", static_cast<long long>(master_seed));
    // out_dir and threads are execution details, not experiment parameters;
    // leaving them out keeps the resolved config byte-identical across
    // reruns into different directories and across thread counts.
    if (input_csv) ini.set("run.input_csv", *input_csv);
    if (output_csv) ini.set("run.output_csv", *output_csv);
    return ini;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errs;
    auto add = [&](const std::string& e) { errs.push_back(e); };

    std::size_t n = 0;
    try {
        n = cfg.fast_length();
    } catch (const std::exception& e) {
        add(e.what());
    }
    if (cfg.factor == 0) add("downsampling factor F must be positive");
    if (n > 0 && cfg.factor > 0) {
        if (n % cfg.factor != 0)
            add("F = " + std::to_string(cfg.factor) + " does not divide N = " +
                std::to_string(n));
        else {
            const std::size_t m = n / cfg.factor;
            for (const auto& v : cfg.lpm.violations(m)) add(v);
            if (cfg.excitation_kind == ExcitationKind::sparse && m % 2 != 0)
                add("sparse excitation requires even M, got M = " + std::to_string(m));
        }
    }
    if (!(cfg.excitation_rms > 0.0)) add("excitation rms must be positive");
    if (cfg.noise.sigma < 0.0) add("noise sigma must be nonnegative");
    if (cfg.plant.den.empty() || cfg.plant.den[0] == 0.0)
        add("plant denominator leading coefficient must be nonzero");
    if (cfg.lpm.factor != cfg.factor)
        add("lpm factor must equal the grid downsampling factor");
    if (cfg.methods.empty()) add("no identification method selected");
    if (cfg.methods.count(Method::sparse) > 0 &&
        cfg.excitation_kind != ExcitationKind::sparse && !cfg.input_csv)
        add("sparse method requires sparse excitation");
    if (static_cast<bool>(cfg.input_csv) != static_cast<bool>(cfg.output_csv))
        add("external data needs both input_csv and output_csv");
    if (cfg.threads == 0) add("threads must be positive");
    return errs;
}

namespace {

void ensure_valid(const ExperimentConfig& cfg) {
    const auto errs = validate_config(cfg);
    if (errs.empty()) return;
    std::string msg = "invalid experiment config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw std::invalid_argument(msg);
}

std::vector<double> read_record_csv(const std::string& path) {
    const auto table = io::read_csv(path);
    const std::size_t col = table.column("value");
    std::vector<double> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) out.push_back(row[col]);
    return out;
}

void write_frf_csv(const std::string& path, const FrequencyGrid& grid,
                   std::span<const cplx> frf, std::span<const double> variance,
                   std::span<const BinFlag> flags,
                   std::span<const std::size_t> bins = {}) {
    std::vector<std::vector<double>> rows;
    const std::size_t count = bins.empty() ? frf.size() : bins.size();
    rows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t k = bins.empty() ? i : bins[i];
        const cplx g = frf[i];
        rows.push_back({static_cast<double>(k),
                        grid.hz(static_cast<std::ptrdiff_t>(k)), g.real(), g.imag(),
                        20.0 * std::log10(std::abs(g)), std::arg(g),
                        variance.empty() ? 0.0 : variance[i],
                        static_cast<double>(flags.empty() ? 0 : static_cast<int>(flags[i]))});
    }
    io::write_csv(path, {"bin", "freq_hz", "re", "im", "mag_db", "phase_rad",
                         "variance", "valid_flag"}, rows);
}

}  // namespace

IdentifyResult run_identify(const ExperimentConfig& cfg) {
    ensure_valid(cfg);
    const FrequencyGrid grid = cfg.grid();
    fs::create_directories(cfg.out_dir);

    IdentifyResult result;
    result.grid = grid;
    result.out_dir = cfg.out_dir;

    std::vector<std::size_t> sparse_bins;
    if (cfg.excitation_kind == ExcitationKind::sparse)
        sparse_bins = sparse_multisine_bins(grid);

    // Steps 1-2: excitation and plant response (or externally measured data).
    if (cfg.input_csv) {
        result.input_fast = read_record_csv(*cfg.input_csv);
        result.output_slow = read_record_csv(*cfg.output_csv);
        if (result.input_fast.size() != grid.fast_length ||
            result.output_slow.size() != grid.slow_length)
            throw std::invalid_argument(
                "external records do not match the configured grid");
    } else {
        ExcitationSpec spec;
        spec.grid = grid;
        spec.kind = cfg.excitation_kind;
        spec.excited_bins = (cfg.excitation_kind == ExcitationKind::sparse)
                                ? sparse_bins
                                : full_spectrum_bins(grid);
        spec.rms = cfg.excitation_rms;
        spec.seed = cfg.excitation_seed;
        auto excitation = random_phase_multisine(spec);
        result.input_fast = excitation.samples;

        // The sparse estimator neglects the transient, so its data are taken
        // in periodic steady state; the full-spectrum estimator absorbs the
        // transient and runs from zero initial state.
        std::vector<double> y_fast =
            (cfg.excitation_kind == ExcitationKind::sparse)
                ? simulate_steady_state(cfg.plant, result.input_fast)
                : simulate_lti(cfg.plant, result.input_fast);
        auto y_slow = slow_sample(y_fast, grid.factor);
        if (cfg.noise.sigma > 0.0) {
            NoiseModel noise = cfg.noise;
            noise.seed = Rng::child_seed(cfg.master_seed, 0);
            y_slow = add_noise(y_slow, noise);
        }
        result.output_slow = std::move(y_slow);

        result.oracle.resize(grid.fast_length);
        for (std::size_t k = 0; k < grid.fast_length; ++k)
            result.oracle[k] =
                cfg.plant.response(grid.omega(static_cast<std::ptrdiff_t>(k)));
    }

    // Step 3: DFTs of both records.
    const Spectrum u_fast = dft(result.input_fast, Rate::fast);
    const Spectrum y_slow = dft(result.output_slow, Rate::slow);

    // Step 4: the selected estimators.
    if (cfg.methods.count(Method::lpm) > 0)
        result.lpm = estimate_frf_lpm(u_fast, y_slow, grid, cfg.lpm, cfg.threads);
    if (cfg.methods.count(Method::sparse) > 0) {
        if (sparse_bins.empty()) sparse_bins = sparse_multisine_bins(grid);
        result.sparse = estimate_sparse(u_fast, y_slow, grid, sparse_bins);
    }
    if (cfg.methods.count(Method::etfe) > 0)
        result.etfe = etfe_baseline(u_fast, y_slow, grid);

    // Bundle on disk.
    write_record_csv(cfg.out_dir + "/input_fast.csv", result.input_fast, grid.fast_dt);
    write_record_csv(cfg.out_dir + "/output_slow.csv", result.output_slow, grid.slow_dt);
    cfg.to_ini().write_file(cfg.out_dir + "/resolved_config.ini");

    if (!result.oracle.empty()) {
        std::vector<std::vector<double>> rows;
        rows.reserve(grid.fast_length);
        for (std::size_t k = 0; k < grid.fast_length; ++k)
            rows.push_back({static_cast<double>(k),
                            grid.hz(static_cast<std::ptrdiff_t>(k)),
                            result.oracle[k].real(), result.oracle[k].imag()});
        io::write_csv(cfg.out_dir + "/oracle.csv", {"bin", "freq_hz", "re", "im"}, rows);
    }

    auto write_error_csv = [&](const std::string& method,
                               std::span<const cplx> frf,
                               std::span<const BinFlag> flags,
                               std::span<const std::size_t> bins) {
        if (result.oracle.empty()) return;
        std::vector<std::vector<double>> rows;
        const std::size_t count = bins.empty() ? frf.size() : bins.size();
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t k = bins.empty() ? i : bins[i];
            const cplx g0 = result.oracle[k];
            const double rel =
                (std::abs(g0) > 0.0) ? std::abs(frf[i] - g0) / std::abs(g0)
                                     : std::numeric_limits<double>::quiet_NaN();
            rows.push_back({static_cast<double>(k),
                            grid.hz(static_cast<std::ptrdiff_t>(k)), rel,
                            static_cast<double>(static_cast<int>(flags[i]))});
        }
        io::write_csv(cfg.out_dir + "/error_" + method + ".csv",
                      {"bin", "freq_hz", "rel_error", "valid_flag"}, rows);
    };

    json manifest;
    manifest["rng_algorithm"] = Rng::kAlgorithm;
    manifest["master_seed"] = cfg.master_seed;
    manifest["excitation_seed"] = cfg.excitation_seed;
    const std::string resolved = cfg.to_ini().serialize();
    manifest["config_hash"] = io::fnv1a_hex(resolved);
    manifest["grid"] = {{"N", grid.fast_length},
                        {"M", grid.slow_length},
                        {"F", grid.factor},
                        {"fs_h", 1.0 / grid.fast_dt}};
    json files = json::array();

    if (result.lpm) {
        const auto& est = *result.lpm;
        write_frf_csv(cfg.out_dir + "/frf_lpm.csv", grid, est.frf, est.variance,
                      est.flags);
        write_error_csv("lpm", est.frf, est.flags, {});
        files.push_back("frf_lpm.csv");
        std::vector<double> cond;
        for (std::size_t k = 0; k < est.condition.size(); ++k)
            if (est.bin_valid(k)) cond.push_back(est.condition[k]);
        manifest["lpm"] = {
            {"valid_bins", cond.size()},
            {"condition_median", median_of(cond)},
            {"condition_max",
             cond.empty() ? 0.0 : *std::max_element(cond.begin(), cond.end())}};
    }
    if (result.sparse) {
        const auto& est = *result.sparse;
        write_frf_csv(cfg.out_dir + "/frf_sparse.csv", grid, est.frf, {}, est.flags,
                      est.bins);
        write_error_csv("sparse", est.frf, est.flags, est.bins);
        files.push_back("frf_sparse.csv");
        std::size_t flagged = 0;
        for (auto f : est.flags)
            if (f != BinFlag::ok) ++flagged;
        manifest["sparse"] = {{"bins", est.bins.size()}, {"flagged", flagged}};
    }
    if (result.etfe) {
        const auto& est = *result.etfe;
        write_frf_csv(cfg.out_dir + "/frf_etfe.csv", grid, est.frf, {}, est.flags);
        write_error_csv("etfe", est.frf, est.flags, {});
        files.push_back("frf_etfe.csv");
    }
    manifest["files"] = files;

    std::ofstream mf(cfg.out_dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";
    return result;
}

MonteCarloResult run_montecarlo(const ExperimentConfig& cfg, std::size_t n_runs) {
    ensure_valid(cfg);
    if (n_runs < 2)
        throw std::invalid_argument("run_montecarlo: need at least 2 runs");
    if (!(cfg.noise.sigma > 0.0))
        throw std::invalid_argument("run_montecarlo: noise sigma must be positive");

    const FrequencyGrid grid = cfg.grid();
    fs::create_directories(cfg.out_dir);
    const std::size_t n = grid.fast_length;

    // Fixed excitation and plant; only the noise realization varies.
    ExcitationSpec spec;
    spec.grid = grid;
    spec.kind = ExcitationKind::full_spectrum;
    spec.excited_bins = full_spectrum_bins(grid);
    spec.rms = cfg.excitation_rms;
    spec.seed = cfg.excitation_seed;
    const auto excitation = random_phase_multisine(spec);
    const auto y_fast = simulate_lti(cfg.plant, excitation.samples);
    const auto y_slow_clean = slow_sample(y_fast, grid.factor);
    const Spectrum u_fast = dft(excitation.samples, Rate::fast);

    // The regressor of each window depends only on the excitation, which is
    // fixed across runs; factor it once and reuse it for every realization.
    const LpmConfig& lp = cfg.lpm;
    const auto p = static_cast<Eigen::Index>(lp.parameter_count());
    const double dof =
        static_cast<double>(lp.window_size()) - static_cast<double>(p);
    const double f = static_cast<double>(lp.factor);
    struct WindowFactor {
        Eigen::MatrixXcd basis;   // V of K = U S V^H, row-space basis of K
        Eigen::VectorXcd g_gain;  // S^{-1} (U^H e1), maps y V onto theta(0)
        double s_norm2 = 0.0;
        bool valid = false;
    };
    std::vector<WindowFactor> factors(n);
    {
        Spectrum placeholder;
        placeholder.rate = Rate::slow;
        placeholder.values.assign(grid.slow_length, cplx{0.0, 0.0});
        for (std::size_t k = 0; k < n; ++k) {
            const auto reg = build_regression(u_fast, placeholder,
                                              static_cast<std::ptrdiff_t>(k), lp);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
                reg.K, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const auto& sv = svd.singularValues();
            Eigen::Index rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv(i) > lp.rank_tol * sv(0)) ++rank;
            if (rank < p) continue;
            auto& fac = factors[k];
            fac.basis = svd.matrixV();
            fac.g_gain = svd.matrixU().row(0).adjoint();
            for (Eigen::Index i = 0; i < p; ++i) {
                fac.g_gain(i) /= sv(i);
                fac.s_norm2 += std::norm(fac.g_gain(i));
            }
            fac.valid = true;
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<cplx>> frfs(n_runs);
    std::vector<std::vector<double>> vars(n_runs), alts(n_runs), cvs(n_runs);
    auto run_one = [&](std::size_t i) {
        NoiseModel noise = cfg.noise;
        noise.seed = Rng::child_seed(cfg.master_seed, i);
        const auto y_noisy = add_noise(y_slow_clean, noise);
        const Spectrum y_spec = dft(y_noisy, Rate::slow);
        frfs[i].assign(n, cplx{nan, nan});
        vars[i].assign(n, nan);
        alts[i].assign(n, nan);
        cvs[i].assign(n, nan);
        const auto nw = static_cast<std::ptrdiff_t>(lp.half_width);
        Eigen::RowVectorXcd y(2 * nw + 1);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& fac = factors[k];
            if (!fac.valid) continue;
            for (std::ptrdiff_t r = -nw; r <= nw; ++r)
                y(r + nw) = y_spec.at(static_cast<std::ptrdiff_t>(k) + r);
            const Eigen::RowVectorXcd z = y * fac.basis;
            frfs[i][k] = f * (z * fac.g_gain)(0);
            const double cv =
                std::max(0.0, y.squaredNorm() - z.squaredNorm()) / dof;
            cvs[i][k] = cv;
            vars[i][k] = f * fac.s_norm2 * cv;
            alts[i][k] = f * f * fac.s_norm2 * cv;
        }
    };
    if (cfg.threads <= 1) {
        for (std::size_t i = 0; i < n_runs; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < cfg.threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n_runs; i += cfg.threads) run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    MonteCarloResult res;
    res.grid = grid;
    res.runs = n_runs;
    res.out_dir = cfg.out_dir;
    res.empirical.assign(n, 0.0);
    res.analytic.assign(n, 0.0);
    res.analytic_alt.assign(n, 0.0);
    res.noise_var.assign(n, 0.0);
    const double inv_runs = 1.0 / static_cast<double>(n_runs);
    for (std::size_t k = 0; k < n; ++k) {
        cplx mean = 0.0;
        for (std::size_t i = 0; i < n_runs; ++i) mean += frfs[i][k];
        mean *= inv_runs;
        double var = 0.0, an = 0.0, alt = 0.0, cv = 0.0;
        for (std::size_t i = 0; i < n_runs; ++i) {
            var += std::norm(frfs[i][k] - mean);
            an += vars[i][k];
            alt += alts[i][k];
            cv += cvs[i][k];
        }
        res.empirical[k] = var * inv_runs;
        res.analytic[k] = an * inv_runs;
        res.analytic_alt[k] = alt * inv_runs;
        res.noise_var[k] = cv * inv_runs;
    }

    std::vector<double> r1, r2;
    for (std::size_t k = 0; k < n; ++k) {
        if (res.empirical[k] > 0.0 && std::isfinite(res.analytic[k])) {
            r1.push_back(res.analytic[k] / res.empirical[k]);
            r2.push_back(res.analytic_alt[k] / res.empirical[k]);
        }
    }
    res.median_ratio = median_of(r1);
    res.median_ratio_alt = median_of(r2);
    const bool f_ok = res.median_ratio >= 0.5 && res.median_ratio <= 2.0;
    const bool f2_ok = res.median_ratio_alt >= 0.5 && res.median_ratio_alt <= 2.0;
    res.winning_scaling = f_ok == f2_ok ? "ambiguous" : (f_ok ? "F" : "F^2");

    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        rows.push_back({static_cast<double>(k),
                        grid.hz(static_cast<std::ptrdiff_t>(k)), res.empirical[k],
                        res.analytic[k], res.analytic_alt[k], res.noise_var[k]});
    io::write_csv(cfg.out_dir + "/variance_study.csv",
                  {"bin", "freq_hz", "empirical", "analytic_F", "analytic_F2",
                   "noise_var"},
                  rows);

    json manifest;
    manifest["rng_algorithm"] = Rng::kAlgorithm;
    manifest["runs"] = n_runs;
    manifest["master_seed"] = cfg.master_seed;
    manifest["config_hash"] = io::fnv1a_hex(cfg.to_ini().serialize());
    manifest["median_ratio_F"] = res.median_ratio;
    manifest["median_ratio_F2"] = res.median_ratio_alt;
    manifest["winning_scaling"] = res.winning_scaling;
    std::ofstream mf(cfg.out_dir + "/montecarlo_manifest.json");
    mf << manifest.dump(2) << "\n";
    return res;
}

std::vector<MethodBandStats> compare_methods(const std::vector<std::string>& bundle_dirs,
                                             const std::string& out_csv,
                                             const std::string& out_txt) {
    if (bundle_dirs.empty())
        throw std::invalid_argument("compare_methods: no bundles given");

    struct Loaded {
        std::string method;
        io::CsvTable frf;
    };
    std::vector<Loaded> loaded;
    std::vector<double> oracle_re, oracle_im;
    std::size_t n = 0;

    for (const auto& dir : bundle_dirs) {
        const auto oracle_path = dir + "/oracle.csv";
        if (!fs::exists(oracle_path))
            throw std::runtime_error("compare_methods: " + dir +
                                     " has no oracle.csv (external data bundles "
                                     "cannot be compared against the true FRF)");
        const auto oracle = io::read_csv(oracle_path);
        if (n == 0) {
            n = oracle.rows.size();
            const auto re = oracle.column("re");
            const auto im = oracle.column("im");
            for (const auto& row : oracle.rows) {
                oracle_re.push_back(row[re]);
                oracle_im.push_back(row[im]);
            }
        } else if (oracle.rows.size() != n) {
            throw std::runtime_error("compare_methods: bundles have mismatched grids");
        }
        for (const auto& m : {"lpm", "sparse", "etfe"}) {
            const std::string path = dir + "/frf_" + m + ".csv";
            if (fs::exists(path)) loaded.push_back({m, io::read_csv(path)});
        }
    }
    if (loaded.empty())
        throw std::runtime_error("compare_methods: no FRF files found in bundles");

    // Band b covers frequencies [b, b+1) * slow Nyquist; bins folded to 0..N/2.
    // The band count F is recovered from the grid ratio below.
    std::vector<MethodBandStats> table;
    std::string txt;
    for (const auto& item : loaded) {
        const auto bin_col = item.frf.column("bin");
        const auto re_col = item.frf.column("re");
        const auto im_col = item.frf.column("im");
        const auto flag_col = item.frf.column("valid_flag");
        // Infer F from the data: the FRF grid has n bins and the error files
        // relate to the same oracle; bands are multiples of M/2 = n/(2F).
        // All bundled runs share the grid, so use n and the bundle's
        // resolved_config for F.
        std::size_t factor = 0;
        for (const auto& dir : bundle_dirs) {
            const std::string cfgpath = dir + "/resolved_config.ini";
            if (fs::exists(cfgpath)) {
                factor = static_cast<std::size_t>(
                    io::IniFile::parse_file(cfgpath).get_int("grid.factor"));
                break;
            }
        }
        if (factor == 0)
            throw std::runtime_error("compare_methods: cannot determine F");
        const std::size_t m = n / factor;

        std::vector<std::vector<double>> band_errors(factor);
        for (const auto& row : item.frf.rows) {
            const auto k = static_cast<std::size_t>(row[bin_col]);
            if (row[flag_col] != 0.0) continue;
            const std::size_t folded = std::min(k % n, n - (k % n));
            std::size_t band = (2 * folded) / m;  // folded / (M/2)
            if (band >= factor) band = factor - 1;  // fast Nyquist edge
            const cplx g0{oracle_re[k % n], oracle_im[k % n]};
            if (std::abs(g0) == 0.0) continue;
            const cplx g{row[re_col], row[im_col]};
            band_errors[band].push_back(std::abs(g - g0) / std::abs(g0));
        }
        for (std::size_t b = 0; b < factor; ++b) {
            if (band_errors[b].empty()) continue;
            MethodBandStats st;
            st.method = item.method;
            st.band = b;
            st.bins = band_errors[b].size();
            st.median_rel_error = median_of(band_errors[b]);
            st.max_rel_error =
                *std::max_element(band_errors[b].begin(), band_errors[b].end());
            table.push_back(st);
            char line[160];
            std::snprintf(line, sizeof(line),
                          "%-8s band %zu: bins=%6zu median_rel=%.3e max_rel=%.3e\n",
                          st.method.c_str(), b, st.bins, st.median_rel_error,
                          st.max_rel_error);
            txt += line;
        }
    }

    if (!out_csv.empty()) {
        std::vector<std::vector<double>> rows;
        for (const auto& st : table)
            rows.push_back({static_cast<double>(st.band), static_cast<double>(st.bins),
                            st.median_rel_error, st.max_rel_error,
                            static_cast<double>(static_cast<int>(
                                method_from_name(st.method)))});
        io::write_csv(out_csv, {"band", "bins", "median_rel_error", "max_rel_error",
                                "method_id"}, rows);
    }
    if (!out_txt.empty()) {
        std::ofstream f(out_txt);
        f << txt;
    }
    return table;
}

}  // namespace frfid
