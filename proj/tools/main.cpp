// lwadoa: DoA estimation with a frequency beam-scanning leaky-wave antenna.
//
// Subcommands: pattern, simulate, plan, estimate, bench. Every run writes a
// manifest plus a loss-free resolved config that reproduces the outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lwadoa/estimator.hpp"
#include "lwadoa/io.hpp"
#include "lwadoa/presets.hpp"
#include "lwadoa/rng.hpp"

namespace {

using namespace lwadoa;

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct CommonOpts {
    std::string preset = "paper-fig2";
    std::string config_path;
    std::string out_dir = ".";
    bool dry_run = false;

    // spot overrides; NaN / empty / negative sentinel means "not given"
    std::string antenna_preset;
    double fmin = 0.0, fmax = 0.0;
    int nfreq = 0;
    std::string fov;
    double sector_width = 0.0;
    double grid_step = 0.0;
    std::string method;
    double snr = std::numeric_limits<double>::quiet_NaN();
    int snapshots = 0;
    int trials = 0;
    std::int64_t seed = -1;
    int threads = 0;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--preset", o.preset, "Configuration preset name");
    cmd->add_option("--config", o.config_path, "Key-value config file overlaying the preset");
    cmd->add_option("--out-dir", o.out_dir, "Output directory");
    cmd->add_flag("--dry-run", o.dry_run, "Write manifest only, skip computation");
    cmd->add_option("--antenna-preset", o.antenna_preset, "Antenna preset (paper)");
    cmd->add_option("--fmin", o.fmin, "Band start [Hz]");
    cmd->add_option("--fmax", o.fmax, "Band end [Hz]");
    cmd->add_option("--nfreq", o.nfreq, "Number of frequency samples");
    cmd->add_option("--fov", o.fov, "Field of view lo,hi [deg]");
    cmd->add_option("--sector-width", o.sector_width, "Sector width [deg]");
    cmd->add_option("--grid-step", o.grid_step, "Candidate grid step [deg]");
    cmd->add_option("--method", o.method, "Estimator method(s), comma separated");
    cmd->add_option("--snr", o.snr, "SNR [dB]");
    cmd->add_option("--snapshots", o.snapshots, "Snapshot count T");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--threads", o.threads, "Worker threads for bench");
}

KeyValueConfig load_config(const CommonOpts& o) {
    KeyValueConfig cfg = preset_config(o.preset);
    if (!o.config_path.empty()) {
        const KeyValueConfig file = KeyValueConfig::parse_file(o.config_path);
        for (const auto& [k, v] : file.entries()) {
            // accept both bare keys and the manifest's config. prefix
            if (k.rfind("config.", 0) == 0)
                cfg.set(k.substr(7), v);
            else
                cfg.set(k, v);
        }
    }
    if (!o.antenna_preset.empty() && o.antenna_preset != "paper")
        throw ConfigError("unknown antenna preset '" + o.antenna_preset + "'");
    if (o.fmin > 0.0) {
        cfg.set("band.mode", "explicit");
        cfg.set("band.f_min", format_exact(o.fmin));
    }
    if (o.fmax > 0.0) {
        cfg.set("band.mode", "explicit");
        cfg.set("band.f_max", format_exact(o.fmax));
    }
    if (o.nfreq > 0) cfg.set("band.nfreq", std::to_string(o.nfreq));
    if (!o.fov.empty()) {
        const auto comma = o.fov.find(',');
        if (comma == std::string::npos) throw ConfigError("--fov expects 'lo,hi'");
        cfg.set("fov.lo", o.fov.substr(0, comma));
        cfg.set("fov.hi", o.fov.substr(comma + 1));
    }
    if (o.sector_width > 0.0) cfg.set("sector.width_deg", format_exact(o.sector_width));
    if (o.grid_step > 0.0) cfg.set("sector.grid_step_deg", format_exact(o.grid_step));
    if (!o.method.empty()) cfg.set("bench.methods", o.method);
    if (!std::isnan(o.snr)) cfg.set("bench.snr_db", format_exact(o.snr));
    if (o.snapshots > 0) cfg.set("bench.snapshots", std::to_string(o.snapshots));
    if (o.trials > 0) cfg.set("bench.trials", std::to_string(o.trials));
    if (o.seed >= 0) cfg.set("bench.seed", std::to_string(o.seed));
    if (o.threads > 0) cfg.set("bench.threads", std::to_string(o.threads));
    return cfg;
}

void finish_run(const std::string& command, const CommonOpts& o,
                const KeyValueConfig& resolved, std::vector<std::string> outputs,
                const std::string& started) {
    std::filesystem::create_directories(o.out_dir);
    const std::string cfg_path = o.out_dir + "/config_resolved.cfg";
    write_text_file(cfg_path, resolved.dump());
    outputs.push_back(cfg_path);

    RunManifest m;
    m.tool_version = kVersion;
    m.command = command;
    m.master_seed = resolved.get_u64("bench.seed", 1);
    m.started_utc = started;
    m.finished_utc = utc_now();
    m.outputs = outputs;
    m.resolved_config = resolved;
    write_manifest(m, o.out_dir + "/manifest.txt");
}

int cmd_pattern(const CommonOpts& o, int ntheta_hint) {
    const std::string started = utc_now();
    KeyValueConfig cfg = load_config(o);
    if (!cfg.has("pattern.nfreq")) cfg.set("pattern.nfreq", "12");
    if (!cfg.has("pattern.theta_step_deg")) cfg.set("pattern.theta_step_deg", "0.5");
    if (ntheta_hint > 0) cfg.set("pattern.nfreq", std::to_string(ntheta_hint));
    const KeyValueConfig resolved = resolve_config(cfg);
    std::filesystem::create_directories(o.out_dir);

    if (o.dry_run) {
        finish_run("pattern", o, resolved, {}, started);
        return 0;
    }

    const BenchConfig bc = make_bench_config(resolved);
    const int nf = cfg.get_int("pattern.nfreq", 12);
    const double dtheta = cfg.get_double("pattern.theta_step_deg", 0.5);
    const double fov_lo = cfg.get_double("fov.lo", -90.0);
    const double fov_hi = cfg.get_double("fov.hi", 90.0);

    std::string csv = "f_hz,theta_deg,gain_db_normalized,is_radiating\n";
    const FrequencyGrid mesh(bc.grid.f_min_hz, bc.grid.f_max_hz, nf);
    for (int i = 0; i < nf; ++i) {
        const double f = mesh.frequency(i);
        const bool radiating = beam_angle(bc.antenna, f).has_value();
        std::vector<double> gains;
        double peak = 0.0;
        for (double th = fov_lo; th <= fov_hi + 1e-9; th += dtheta) {
            const double g = std::norm(steering_response(bc.antenna, f, th));
            gains.push_back(g);
            peak = std::max(peak, g);
        }
        int j = 0;
        for (double th = fov_lo; th <= fov_hi + 1e-9; th += dtheta, ++j) {
            const double db = 10.0 * std::log10(std::max(gains[static_cast<std::size_t>(j)] / peak, 1e-300));
            csv += format_exact(f) + "," + format_angle(th) + "," +
                   format_angle(db) + "," + (radiating ? "1" : "0") + "\n";
        }
    }
    const std::string path = o.out_dir + "/pattern.csv";
    write_text_file(path, csv);
    finish_run("pattern", o, resolved, {path}, started);
    return 0;
}

int cmd_plan(const CommonOpts& o) {
    const std::string started = utc_now();
    const KeyValueConfig resolved = resolve_config(load_config(o));
    std::filesystem::create_directories(o.out_dir);
    if (o.dry_run) {
        finish_run("plan", o, resolved, {}, started);
        return 0;
    }
    const BenchConfig bc = make_bench_config(resolved);

    std::string csv = "sector,theta_lo_deg,theta_hi_deg,p,i_lo,i_hi,n_s,f_lo_hz,f_hi_hz\n";
    for (const Sector& s : bc.estimator.plan.sectors) {
        csv += std::to_string(s.index) + "," + format_angle(s.theta_lo_deg) + "," +
               format_angle(s.theta_hi_deg) + "," + std::to_string(s.p()) + ",";
        if (s.has_frequencies()) {
            csv += std::to_string(s.freq_index_lo) + "," + std::to_string(s.freq_index_hi) +
                   "," + std::to_string(s.n_s()) + "," +
                   format_exact(bc.grid.frequency(s.freq_index_lo)) + "," +
                   format_exact(bc.grid.frequency(s.freq_index_hi)) + "\n";
        } else {
            csv += "-1,-1,0,,\n";
        }
    }
    const std::string path = o.out_dir + "/plan.csv";
    write_text_file(path, csv);
    std::cout << csv;
    finish_run("plan", o, resolved, {path}, started);
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const std::string started = utc_now();
    const KeyValueConfig resolved = resolve_config(load_config(o));
    std::filesystem::create_directories(o.out_dir);
    if (o.dry_run) {
        finish_run("simulate", o, resolved, {}, started);
        return 0;
    }
    const BenchConfig bc = make_bench_config(resolved);
    const double snr = resolved.get_double_list("bench.snr_db").front();
    const std::uint64_t seed = bc.master_seed;

    const SimulationOutput sim = simulate_snapshots(bc.antenna, bc.grid, bc.scenario,
                                                    bc.snapshots, snr, seed);
    const std::string data_path = o.out_dir + "/snapshots.csv";
    write_snapshots_csv(sim.y, data_path);

    KeyValueConfig meta;
    meta.set("sigma2", format_exact(sim.noise_variance));
    meta.set("snr_db", format_exact(snr));
    meta.set("seed", std::to_string(seed));
    meta.set("rows", std::to_string(sim.y.rows()));
    meta.set("snapshots", std::to_string(sim.y.snapshots()));
    for (const auto& [k, v] : resolved.entries()) meta.set(k, v);
    const std::string meta_path = o.out_dir + "/snapshots.meta";
    write_text_file(meta_path, meta.dump());

    finish_run("simulate", o, resolved, {data_path, meta_path}, started);
    return 0;
}

int cmd_estimate(const CommonOpts& o, const std::string& in_path) {
    const std::string started = utc_now();
    const KeyValueConfig resolved = resolve_config(load_config(o));
    std::filesystem::create_directories(o.out_dir);
    if (o.dry_run) {
        finish_run("estimate", o, resolved, {}, started);
        return 0;
    }
    const BenchConfig bc = make_bench_config(resolved);
    const double snr = resolved.get_double_list("bench.snr_db").front();

    SnapshotMatrix y;
    if (!in_path.empty()) {
        y = read_snapshots_csv(in_path);
        if (y.rows() != bc.grid.n)
            throw ConfigError("snapshot rows do not match the configured band");
    } else {
        y = simulate_snapshots(bc.antenna, bc.grid, bc.scenario, bc.snapshots, snr,
                               bc.master_seed)
                .y;
    }

    EstimatorConfig est = bc.estimator;
    est.mode = method_from_name(resolved.get_string_list("bench.methods").front());
    if (!est.k_known) est.k_known = bc.scenario.k();

    std::vector<SpectrumPoint> spectrum;
    const std::vector<DoaEstimate> out = estimate(y, bc.antenna, bc.grid, est, &spectrum);

    std::string est_csv = "angle_deg,weight,sector,refined\n";
    for (const DoaEstimate& e : out)
        est_csv += format_angle(e.angle_deg) + "," + format_exact(e.weight) + "," +
                   std::to_string(e.sector) + "," + (e.refined ? "1" : "0") + "\n";
    const std::string est_path = o.out_dir + "/estimates.csv";
    write_text_file(est_path, est_csv);

    std::string spec_csv = "sector,theta_deg,gamma\n";
    for (const SpectrumPoint& p : spectrum)
        spec_csv += std::to_string(p.sector) + "," + format_angle(p.theta_deg) + "," +
                    format_exact(p.gamma) + "\n";
    const std::string spec_path = o.out_dir + "/spectrum.csv";
    write_text_file(spec_path, spec_csv);

    std::cout << est_csv;
    finish_run("estimate", o, resolved, {est_path, spec_path}, started);
    return 0;
}

int cmd_bench(const CommonOpts& o) {
    const std::string started = utc_now();
    const KeyValueConfig resolved = resolve_config(load_config(o));
    std::filesystem::create_directories(o.out_dir);
    if (o.dry_run) {
        finish_run("bench", o, resolved, {}, started);
        return 0;
    }
    const BenchConfig bc = make_bench_config(resolved);
    const BenchResult result = run_monte_carlo(bc);
    std::vector<std::string> outputs = emit_bench_csvs(result, o.out_dir);

    for (const BenchCell& c : result.cells)
        std::printf("%-16s snr %6.1f dB  rmse %8.4f deg  failures %3d  runtime %.4f s\n",
                    c.method.c_str(), c.snr_db, c.rmse_deg, c.failures, c.mean_runtime_s);

    finish_run("bench", o, resolved, outputs, started);

    const int total = static_cast<int>(bc.methods.size() * bc.snr_grid_db.size()) * bc.trials;
    if (result.hard_failures > bc.failure_budget * total) {
        std::cerr << "hard failure budget exceeded: " << result.hard_failures << "/"
                  << total << "\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DoA estimation with a frequency beam-scanning leaky-wave antenna"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string in_path;
    int pattern_nfreq = 0;

    CLI::App* pattern = app.add_subcommand("pattern", "Export the radiation pattern mesh");
    add_common_flags(pattern, o);

    CLI::App* simulate = app.add_subcommand("simulate", "Generate a snapshot matrix");
    add_common_flags(simulate, o);

    CLI::App* plan = app.add_subcommand("plan", "Print the sector plan");
    add_common_flags(plan, o);

    CLI::App* estimate = app.add_subcommand("estimate", "Estimate DoAs from snapshots");
    add_common_flags(estimate, o);
    estimate->add_option("--in", in_path, "Snapshot CSV produced by `simulate`");

    CLI::App* bench = app.add_subcommand("bench", "Run the Monte Carlo benchmark");
    add_common_flags(bench, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (pattern->parsed()) return cmd_pattern(o, pattern_nfreq);
        if (simulate->parsed()) return cmd_simulate(o);
        if (plan->parsed()) return cmd_plan(o);
        if (estimate->parsed()) return cmd_estimate(o, in_path);
        if (bench->parsed()) return cmd_bench(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidParamsError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
