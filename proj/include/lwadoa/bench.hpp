#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwadoa/estimator.hpp"

namespace lwadoa {

struct BenchConfig {
    std::vector<double> snr_grid_db;
    int trials = 100;
    int snapshots = 100;
    SourceScenario scenario;
    std::vector<EstimatorMode> methods;
    std::uint64_t master_seed = 1;
    int threads = 1;
    double failure_budget = 0.1;  // tolerated fraction of hard per-trial failures

    AntennaParams antenna;
    FrequencyGrid grid;
    EstimatorConfig estimator;  // mode is overridden per method

    void validate() const;
};

struct TrialRecord {
    std::string method;
    double snr_db = 0.0;
    int trial = 0;
    std::vector<double> errors_deg;  // one per true source; misses carry the penalty
    double runtime_s = 0.0;
    bool wrong_cardinality = false;
    bool hard_failure = false;       // estimator threw; recorded, never aborts
};

struct BenchCell {
    std::string method;
    double snr_db = 0.0;
    double rmse_deg = 0.0;
    double mean_runtime_s = 0.0;
    int failures = 0;  // trials with wrong cardinality
};

struct BenchResult {
    std::vector<BenchCell> cells;        // one per (method, snr), config order
    std::vector<TrialRecord> trials;     // one per (method, snr, trial)
    int hard_failures = 0;
    int k = 0;
};

/// Miss penalty: half the field of view.
inline constexpr double kMissPenaltyDeg = 90.0;

struct Matching {
    std::vector<double> errors_deg;  // per true source, penalty when unmatched
    double total_cost = 0.0;         // sum of squared errors including penalties
};

/// Minimum-total-squared-error assignment of estimates to true angles,
/// found by exhaustive enumeration (optimal at the K <= 5 scale used
/// here). Unmatched truths count as misses at the penalty error.
Matching match_estimates(const std::vector<double>& estimates_deg,
                         const std::vector<double>& truth_deg);

/// Pooled RMSE over every matched pair of every trial.
double rmse(const std::vector<TrialRecord>& records);

/// Runs the Monte Carlo sweep. Per-trial seeds derive from
/// (master_seed, method, snr, trial), so results are a pure function of
/// the config regardless of the thread count; only runtimes vary.
BenchResult run_monte_carlo(const BenchConfig& config);

std::string method_name(EstimatorMode mode);
EstimatorMode method_from_name(const std::string& name);

}  // namespace lwadoa
