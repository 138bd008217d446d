#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "frfid/estimators.hpp"
#include "frfid/excitation.hpp"
#include "frfid/io.hpp"
#include "frfid/plantsim.hpp"
#include "frfid/spectra.hpp"

namespace frfid {

enum class Method { lpm, sparse, etfe };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Cascade of one resonant zero pair and one resonant pole pair per axis,
/// discretized by the bilinear transform and normalized to unit DC gain.
/// The default parameters give the two-resonance reference plant used by
/// the bundled configs (second resonance above the slow Nyquist).
TransferFunction resonant_plant(double dt, double pole1_hz = 8.0,
                                double pole2_hz = 45.0, double zero1_hz = 12.0,
                                double zero2_hz = 30.0, double pole_damping = 0.35,
                                double zero_damping = 0.45);

/// Everything one run needs; defaults mirror the bundled full-scale config
/// (fs_h = 120 Hz, F = 4, T_m = 120 s, nw = 150, R = 2).
struct ExperimentConfig {
    ExperimentConfig();  ///< installs the resonant reference plant

    double fs_fast = 120.0;          ///< fast sampling rate [Hz]
    std::size_t factor = 4;          ///< F
    double measurement_time = 120.0; ///< T_m [s]

    TransferFunction plant;
    NoiseModel noise;                ///< sigma = 0 disables noise

    ExcitationKind excitation_kind = ExcitationKind::full_spectrum;
    double excitation_rms = 8.3e-3;
    std::uint64_t excitation_seed = 1;

    LpmConfig lpm;

    std::set<Method> methods{Method::lpm};
    std::size_t montecarlo_runs = 0;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    unsigned threads = 1;

    /// Optional external measured data (fast input / slow output CSVs);
    /// when set, simulation and oracle outputs are skipped.
    std::optional<std::string> input_csv;
    std::optional<std::string> output_csv;

    std::size_t fast_length() const;  ///< N = fs_h * T_m
    FrequencyGrid grid() const;

    static ExperimentConfig from_ini(const io::IniFile& ini);
    io::IniFile to_ini() const;  ///< fully resolved, for provenance write-back
};

/// Checks every arithmetic and ordering constraint; returns all violations.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// In-memory result of one identification run.
struct IdentifyResult {
    FrequencyGrid grid;
    std::vector<double> input_fast;
    std::vector<double> output_slow;
    std::optional<FrfEstimate> lpm;
    std::optional<SparseEstimate> sparse;
    std::optional<EtfeEstimate> etfe;
    std::vector<cplx> oracle;  ///< true FRF over the fast grid; empty for external data
    std::string out_dir;
};

/// Procedure steps 1-4: excite, simulate (or load external data), DFT,
/// estimate with every selected method; writes the bundle to cfg.out_dir.
IdentifyResult run_identify(const ExperimentConfig& cfg);

/// Per-bin Monte Carlo variance study over independent noise realizations
/// with fixed excitation and plant.
struct MonteCarloResult {
    FrequencyGrid grid;
    std::size_t runs = 0;
    std::vector<double> empirical;        ///< per-bin empirical variance of Ghat
    std::vector<double> analytic;         ///< mean published estimate (factor F)
    std::vector<double> analytic_alt;     ///< mean alternative estimate (factor F^2)
    std::vector<double> noise_var;        ///< mean Cv sequence (one run basis)
    double median_ratio = 0.0;            ///< median analytic/empirical
    double median_ratio_alt = 0.0;
    std::string winning_scaling;          ///< "F" or "F^2", whichever median ratio is in [0.5,2]
    std::string out_dir;
};

MonteCarloResult run_montecarlo(const ExperimentConfig& cfg, std::size_t n_runs);

/// Per-band error statistics of one method against the oracle.
struct MethodBandStats {
    std::string method;
    std::size_t band = 0;      ///< 0 = below slow Nyquist, 1.. = aliased bands
    std::size_t bins = 0;
    double median_rel_error = 0.0;
    double max_rel_error = 0.0;
};

/// Summarizes one or more bundles (directories written by run_identify) into
/// a per-band comparison table. All bundles must share the same grid.
std::vector<MethodBandStats> compare_methods(const std::vector<std::string>& bundle_dirs,
                                             const std::string& out_csv = "",
                                             const std::string& out_txt = "");

}  // namespace frfid
