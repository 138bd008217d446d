#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frfid/spectra.hpp"

namespace frfid {

enum class ExcitationKind { full_spectrum, sparse };

/// Recipe for a periodic excitation record of one fast-rate period.
struct ExcitationSpec {
    FrequencyGrid grid;
    /// Bins to excite. Values may exceed N/2 (the sparse sets of the
    /// aliased bands do); synthesis folds them onto the conjugate bin.
    std::vector<std::size_t> excited_bins;
    double rms = 1.0;
    std::uint64_t seed = 0;
    ExcitationKind kind = ExcitationKind::full_spectrum;
};

struct ExcitationRecord {
    std::vector<double> samples;  ///< real time record, length N
    Spectrum spectrum;            ///< DFT of samples (after RMS scaling)
};

/// All interior bins 1..N/2-1. DC is skipped so the record is zero-mean;
/// Nyquist is skipped because its phase cannot be drawn freely.
std::vector<std::size_t> full_spectrum_bins(const FrequencyGrid& grid);

/// The broadband sparse set
///   S = { j + i(M+1) | i in [0, F-1], j in {0, F, 2F, ..., M/2} },
/// reduced modulo N. Its bins are pairwise distinct modulo M, so each slow
/// bin receives at most one direct contribution of the aliasing sum.
/// Requires M even; throws otherwise.
std::vector<std::size_t> sparse_multisine_bins(const FrequencyGrid& grid);

/// Flat-amplitude multisine with independent uniform random phases per
/// excited bin. The spectrum is made conjugate-symmetric so the record is
/// real, then one real scale factor sets the RMS exactly.
/// Deterministic: same spec and seed give bit-identical records.
ExcitationRecord random_phase_multisine(const ExcitationSpec& spec);

struct RoughnessReport {
    bool rough = false;    ///< true iff all pairwise window differences exceed the floor
    double margin = 0.0;   ///< minimal |U(k+r1+iM) - U(k+r2+iM)| found
};

/// Regressor-roughness diagnostic: the local solve needs the input DFT to
/// differ across the window in every aliased band.
RoughnessReport check_roughness(const Spectrum& u_fast, const FrequencyGrid& grid,
                                std::size_t half_width, std::ptrdiff_t k,
                                double floor = 1e-12);

/// Writes columns sample_index,time_s,value for replay on external hardware.
void write_record_csv(const std::string& path, std::span<const double> samples,
                      double dt);

}  // namespace frfid
