#include "lwadoa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "lwadoa/rng.hpp"

namespace lwadoa {

void BenchConfig::validate() const {
    if (snr_grid_db.empty()) throw InvalidParamsError("snr grid must be nonempty");
    if (trials < 1) throw InvalidParamsError("trial count must be at least 1");
    if (snapshots < 1) throw InvalidParamsError("snapshot count must be at least 1");
    if (methods.empty()) throw InvalidParamsError("method list must be nonempty");
    if (threads < 1) throw InvalidParamsError("thread count must be at least 1");
    scenario.validate(grid.n);
    estimator.validate();
}

std::string method_name(EstimatorMode mode) {
    switch (mode) {
        case EstimatorMode::kSfOnGrid: return "sf_ongrid";
        case EstimatorMode::kSfOffGrid: return "sf_offgrid";
        case EstimatorMode::kFullFovOnGrid: return "fullfov_ongrid";
    }
    throw InvalidParamsError("unknown estimator mode");
}

EstimatorMode method_from_name(const std::string& name) {
    if (name == "sf_ongrid") return EstimatorMode::kSfOnGrid;
    if (name == "sf_offgrid") return EstimatorMode::kSfOffGrid;
    if (name == "fullfov_ongrid") return EstimatorMode::kFullFovOnGrid;
    throw ConfigError("unknown method '" + name + "'");
}

Matching match_estimates(const std::vector<double>& estimates_deg,
                         const std::vector<double>& truth_deg) {
    if (truth_deg.empty()) throw InvalidParamsError("truth list must be nonempty");
    const int k = static_cast<int>(truth_deg.size());
    const int m = static_cast<int>(estimates_deg.size());

    Matching best;
    best.total_cost = -1.0;

    // Assign each truth either one distinct estimate or a miss; sizes are
    // tiny (K <= 5 at the scales used here) so enumeration is exact.
    std::vector<int> assign(static_cast<std::size_t>(k), -1);
    std::vector<bool> used(static_cast<std::size_t>(m), false);

    auto recurse = [&](auto&& self, int t, double cost) -> void {
        if (best.total_cost >= 0.0 && cost >= best.total_cost) return;
        if (t == k) {
            best.total_cost = cost;
            best.errors_deg.assign(static_cast<std::size_t>(k), kMissPenaltyDeg);
            for (int i = 0; i < k; ++i)
                if (assign[static_cast<std::size_t>(i)] >= 0)
                    best.errors_deg[static_cast<std::size_t>(i)] = std::abs(
                        estimates_deg[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] -
                        truth_deg[static_cast<std::size_t>(i)]);
            return;
        }
        for (int e = 0; e < m; ++e) {
            if (used[static_cast<std::size_t>(e)]) continue;
            const double d = estimates_deg[static_cast<std::size_t>(e)] - truth_deg[static_cast<std::size_t>(t)];
            used[static_cast<std::size_t>(e)] = true;
            assign[static_cast<std::size_t>(t)] = e;
            self(self, t + 1, cost + d * d);
            used[static_cast<std::size_t>(e)] = false;
            assign[static_cast<std::size_t>(t)] = -1;
        }
        // miss branch
        self(self, t + 1, cost + kMissPenaltyDeg * kMissPenaltyDeg);
    };
    recurse(recurse, 0, 0.0);
    return best;
}

double rmse(const std::vector<TrialRecord>& records) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const TrialRecord& r : records)
        for (double e : r.errors_deg) {
            sum += e * e;
            ++n;
        }
    if (n == 0) return 0.0;
    return std::sqrt(sum / static_cast<double>(n));
}

namespace {

TrialRecord run_trial(const BenchConfig& config, EstimatorMode mode, double snr_db,
                      int trial) {
    TrialRecord rec;
    rec.method = method_name(mode);
    rec.snr_db = snr_db;
    rec.trial = trial;

    const std::uint64_t seed = derive_seed(config.master_seed, rec.method,
                                           std::llround(snr_db * 1000.0), trial);
    const SimulationOutput sim = simulate_snapshots(
        config.antenna, config.grid, config.scenario, config.snapshots, snr_db, seed);

    EstimatorConfig est = config.estimator;
    est.mode = mode;
    if (!est.k_known) est.k_known = config.scenario.k();

    std::vector<double> angles;
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::vector<DoaEstimate> out = estimate(sim.y, config.antenna, config.grid, est);
        for (const DoaEstimate& e : out) angles.push_back(e.angle_deg);
    } catch (const Error&) {
        rec.hard_failure = true;
        angles.clear();
    }
    const auto stop = std::chrono::steady_clock::now();
    rec.runtime_s = std::chrono::duration<double>(stop - start).count();

    rec.errors_deg = match_estimates(angles, config.scenario.doas_deg).errors_deg;
    rec.wrong_cardinality = static_cast<int>(angles.size()) != config.scenario.k();
    return rec;
}

}  // namespace

BenchResult run_monte_carlo(const BenchConfig& config) {
    config.validate();

    struct Job {
        EstimatorMode mode;
        double snr_db;
        int trial;
    };
    std::vector<Job> jobs;
    for (EstimatorMode mode : config.methods)
        for (double snr : config.snr_grid_db)
            for (int t = 0; t < config.trials; ++t) jobs.push_back({mode, snr, t});

    BenchResult result;
    result.k = config.scenario.k();
    result.trials.resize(jobs.size());

    // Jobs land in preassigned slots, so aggregation below is independent
    // of the thread schedule.
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            result.trials[i] = run_trial(config, jobs[i].mode, jobs[i].snr_db,
                                         jobs[i].trial);
        }
    };
    if (config.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < config.threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::size_t idx = 0;
    for (EstimatorMode mode : config.methods)
        for (double snr : config.snr_grid_db) {
            BenchCell cell;
            cell.method = method_name(mode);
            cell.snr_db = snr;
            double sq = 0.0, rt = 0.0;
            std::size_t pairs = 0;
            for (int t = 0; t < config.trials; ++t) {
                const TrialRecord& rec = result.trials[idx++];
                for (double e : rec.errors_deg) {
                    sq += e * e;
                    ++pairs;
                }
                rt += rec.runtime_s;
                if (rec.wrong_cardinality) ++cell.failures;
                if (rec.hard_failure) ++result.hard_failures;
            }
            cell.rmse_deg = pairs ? std::sqrt(sq / static_cast<double>(pairs)) : 0.0;
            cell.mean_runtime_s = rt / config.trials;
            result.cells.push_back(cell);
        }
    return result;
}

}  // namespace lwadoa
