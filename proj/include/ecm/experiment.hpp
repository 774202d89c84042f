#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecm/degree_model.hpp"
#include "ecm/estimators.hpp"

namespace ecm {

/// Grid of trials to run. gamma_grid and n_grid are crossed; every cell is
/// replicated. Per-trial seeds derive from master_seed, so the record set is
/// independent of scheduling.
struct SweepPlan {
    std::vector<double> gamma_grid;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replications = 1;
    std::uint64_t k_min = 1;
    std::uint64_t master_seed = 0;
    std::string output_path;  // CSV stream; empty keeps records in memory only
    unsigned threads = 0;     // 0 means all available cores

    void validate() const;  // throws std::invalid_argument on a bad plan
};

/// Default grids: gamma values straddling both regime boundaries, n geometric
/// with ratio 10.
std::vector<double> default_gamma_grid();
std::vector<std::uint64_t> default_n_grid();

/// One trial's statistics. wall_time_ms is timing metadata; determinism
/// comparisons exclude it.
struct TrialRecord {
    double gamma = 0.0;
    std::uint64_t n = 0;
    std::uint64_t replication_index = 0;
    std::uint64_t seed = 0;
    std::uint64_t L_n = 0;
    std::uint64_t sum_squares = 0;
    std::uint64_t self_loops = 0;
    std::uint64_t excess_multiplicity = 0;
    std::uint64_t total_erased = 0;
    double erased_fraction = 0.0;
    double lemma1_bound = 0.0;
    double pairwise_exp_term = 0.0;  // pairwise_exp_sum at scale L_n
    double wall_time_ms = 0.0;

    /// Equality on every field except wall_time_ms.
    bool same_data(const TrialRecord& o) const;
};

inline constexpr const char* trial_csv_header =
    "gamma,n,replication_index,seed,L_n,sum_squares,self_loops,"
    "excess_multiplicity,total_erased,erased_fraction,lemma1_bound,"
    "pairwise_exp_term,wall_time_ms";

std::string trial_to_csv(const TrialRecord& rec);
TrialRecord trial_from_csv(const std::string& line);

/// Full sample -> pair -> erase pipeline for one seed. Deterministic given
/// the arguments; replication_index is filled by the sweep driver.
TrialRecord run_trial(double gamma, std::uint64_t n, std::uint64_t k_min,
                      std::uint64_t seed);

/// Runs the plan, streaming completed records to output_path in canonical
/// (gamma, n, replication) order. Existing complete records for a key are
/// read back and skipped, so interrupted sweeps resume. Returns the full
/// record list in canonical order.
std::vector<TrialRecord> run_sweep(const SweepPlan& plan);

std::vector<TrialRecord> read_trial_csv(const std::string& path);

/// Log-log slope of the replication-mean erased fraction against n for one
/// gamma's records.
struct FitResult {
    double gamma = 0.0;
    double fitted_slope = 0.0;
    double slope_stderr = 0.0;
    double theoretical_slope = 0.0;
    double intercept = 0.0;
    int points_used = 0;
};

/// OLS of log(mean erased_fraction) on log(n). Records must share one gamma.
/// n-levels whose mean fraction is 0 are dropped with a warning to stderr;
/// fewer than 3 surviving levels is an error.
FitResult fit_exponent(const std::vector<TrialRecord>& records);

/// Serializes fits as a JSON array with the FitResult field names.
void write_fit_json(const std::string& path, const std::vector<FitResult>& fits);

/// Two-column "log10(n) log10(mean_fraction)" data block for one gamma,
/// followed by a two-point reference line with the theoretical slope anchored
/// at the first data point (blocks separated by a blank line).
void write_plot_data(const std::string& path,
                     const std::vector<TrialRecord>& records_for_gamma);

}  // namespace ecm
