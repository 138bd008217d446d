#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "frfid/harness.hpp"
#include "frfid/rng.hpp"

namespace {

// Exit codes: 0 success, 1 config error, 2 runtime/numerical error.
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    long long runs = -1;
    long long threads = -1;
    std::vector<std::string> methods;
    std::string input_csv;
    std::string output_csv;
};

frfid::ExperimentConfig load_config(const CommonOpts& opts) {
    auto cfg = frfid::ExperimentConfig::from_ini(
        frfid::io::IniFile::parse_file(opts.config_path));
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.seed >= 0) {
        cfg.master_seed = static_cast<std::uint64_t>(opts.seed);
        cfg.excitation_seed = static_cast<std::uint64_t>(opts.seed);
    }
    if (opts.runs >= 0) cfg.montecarlo_runs = static_cast<std::size_t>(opts.runs);
    if (opts.threads > 0) cfg.threads = static_cast<unsigned>(opts.threads);
    if (!opts.methods.empty()) {
        cfg.methods.clear();
        for (const auto& m : opts.methods)
            cfg.methods.insert(frfid::method_from_name(m));
    }
    if (!opts.input_csv.empty()) cfg.input_csv = opts.input_csv;
    if (!opts.output_csv.empty()) cfg.output_csv = opts.output_csv;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "experiment config file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", opts.seed, "master + excitation seed override");
    cmd->add_option("--threads", opts.threads, "worker thread count override");
}

int check_config(const frfid::ExperimentConfig& cfg) {
    const auto errs = frfid::validate_config(cfg);
    if (errs.empty()) {
        std::printf("config valid: N=%zu M=%zu F=%zu\n", cfg.fast_length(),
                    cfg.fast_length() / cfg.factor, cfg.factor);
        return 0;
    }
    for (const auto& e : errs) std::fprintf(stderr, "config error: %s\n", e.c_str());
    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FRF identification of slow-sampled systems: multiband local "
                 "polynomial, sparse multisine and naive estimators"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* validate = app.add_subcommand("validate", "check an experiment config");
    add_common(validate, opts);

    auto* excite = app.add_subcommand("excite", "synthesize the excitation record");
    add_common(excite, opts);

    auto* simulate =
        app.add_subcommand("simulate", "excite and simulate; write records only");
    add_common(simulate, opts);

    auto* identify = app.add_subcommand(
        "identify", "full pipeline: excite, simulate (or load data), estimate");
    add_common(identify, opts);
    identify->add_option("--methods", opts.methods, "estimators to run (lpm,sparse,etfe)")
        ->delimiter(',');
    identify->add_option("--input-csv", opts.input_csv,
                         "externally measured fast input record");
    identify->add_option("--output-csv", opts.output_csv,
                         "externally measured slow output record");

    auto* montecarlo =
        app.add_subcommand("montecarlo", "variance study over noise realizations");
    add_common(montecarlo, opts);
    montecarlo->add_option("--runs", opts.runs, "number of noise realizations");

    std::vector<std::string> bundles;
    std::string cmp_csv, cmp_txt;
    auto* compare =
        app.add_subcommand("compare", "per-band error table from result bundles");
    compare->add_option("bundles", bundles, "bundle directories from identify")
        ->required();
    compare->add_option("--out-csv", cmp_csv, "comparison table CSV path");
    compare->add_option("--out-txt", cmp_txt, "comparison summary text path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compare->parsed()) {
            const auto table = frfid::compare_methods(bundles, cmp_csv, cmp_txt);
            for (const auto& st : table)
                std::printf("%-8s band %zu: bins=%6zu median_rel=%.3e max_rel=%.3e\n",
                            st.method.c_str(), st.band, st.bins, st.median_rel_error,
                            st.max_rel_error);
            return 0;
        }

        frfid::ExperimentConfig cfg;
        try {
            cfg = load_config(opts);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return kExitConfig;
        }

        if (validate->parsed()) return check_config(cfg);
        if (const int rc = check_config(cfg); rc != 0) return rc;

        if (excite->parsed()) {
            frfid::ExcitationSpec spec;
            spec.grid = cfg.grid();
            spec.kind = cfg.excitation_kind;
            spec.excited_bins =
                (cfg.excitation_kind == frfid::ExcitationKind::sparse)
                    ? frfid::sparse_multisine_bins(spec.grid)
                    : frfid::full_spectrum_bins(spec.grid);
            spec.rms = cfg.excitation_rms;
            spec.seed = cfg.excitation_seed;
            const auto rec = frfid::random_phase_multisine(spec);
            std::filesystem::create_directories(cfg.out_dir);
            frfid::write_record_csv(cfg.out_dir + "/input_fast.csv", rec.samples,
                                    spec.grid.fast_dt);
            std::printf("wrote %s/input_fast.csv (%zu samples, rms %.6g)\n",
                        cfg.out_dir.c_str(), rec.samples.size(), cfg.excitation_rms);
            return 0;
        }
        if (simulate->parsed()) {
            const auto grid = cfg.grid();
            frfid::ExcitationSpec spec;
            spec.grid = grid;
            spec.kind = cfg.excitation_kind;
            spec.excited_bins =
                (cfg.excitation_kind == frfid::ExcitationKind::sparse)
                    ? frfid::sparse_multisine_bins(grid)
                    : frfid::full_spectrum_bins(grid);
            spec.rms = cfg.excitation_rms;
            spec.seed = cfg.excitation_seed;
            const auto rec = frfid::random_phase_multisine(spec);
            const auto y_fast =
                (cfg.excitation_kind == frfid::ExcitationKind::sparse)
                    ? frfid::simulate_steady_state(cfg.plant, rec.samples)
                    : frfid::simulate_lti(cfg.plant, rec.samples);
            auto y_slow = frfid::slow_sample(y_fast, grid.factor);
            if (cfg.noise.sigma > 0.0) {
                auto noise = cfg.noise;
                noise.seed = frfid::Rng::child_seed(cfg.master_seed, 0);
                y_slow = frfid::add_noise(y_slow, noise);
            }
            std::filesystem::create_directories(cfg.out_dir);
            frfid::write_record_csv(cfg.out_dir + "/input_fast.csv", rec.samples,
                                    grid.fast_dt);
            frfid::write_record_csv(cfg.out_dir + "/output_slow.csv", y_slow,
                                    grid.slow_dt);
            std::printf("wrote records to %s\n", cfg.out_dir.c_str());
            return 0;
        }
        if (identify->parsed()) {
            const auto result = frfid::run_identify(cfg);
            std::printf("bundle written to %s\n", result.out_dir.c_str());
            return 0;
        }
        if (montecarlo->parsed()) {
            const std::size_t runs =
                cfg.montecarlo_runs > 0 ? cfg.montecarlo_runs : 100;
            const auto res = frfid::run_montecarlo(cfg, runs);
            std::printf("montecarlo: runs=%zu median ratio F=%.3f F^2=%.3f winner=%s\n",
                        res.runs, res.median_ratio, res.median_ratio_alt,
                        res.winning_scaling.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
