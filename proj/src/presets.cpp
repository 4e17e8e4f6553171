#include "lwadoa/presets.hpp"

#include <cmath>

namespace lwadoa {

FrequencyGrid derive_operating_band(const AntennaParams& params, int nfreq,
                                    double edge_beamwidth_deg) {
    const double fc = cutoff_frequency(params);
    const auto [band_lo, band_hi] = radiating_band(params, fc * 1.001, fc * 3.0);
    const double f_bs = broadside_frequency(params, band_lo, band_hi);

    const double broadside_bw = beamwidth_3db(params, f_bs);
    if (!(edge_beamwidth_deg > broadside_bw))
        throw InvalidParamsError("edge beamwidth must exceed the broadside beamwidth");

    auto bw = [&](double f) { return beamwidth_3db(params, f); };

    // Low side: beamwidth decreases monotonically toward broadside.
    double lo = band_lo + 1e6, hi = f_bs;
    for (int i = 0; i < 200 && (hi - lo) > 1e-3; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bw(mid) > edge_beamwidth_deg)
            lo = mid;
        else
            hi = mid;
    }
    const double f_min = 0.5 * (lo + hi);

    // High side: scan for the first upward crossing, then bisect in it.
    const int kScan = 4096;
    const double top = band_hi - 1e6;
    double prev = f_bs;
    double cell_lo = 0.0, cell_hi = 0.0;
    for (int i = 1; i <= kScan; ++i) {
        const double f = f_bs + (top - f_bs) * i / kScan;
        if (bw(f) >= edge_beamwidth_deg) {
            cell_lo = prev;
            cell_hi = f;
            break;
        }
        prev = f;
    }
    if (cell_hi == 0.0)
        throw InvalidParamsError("beamwidth never reaches the edge value above broadside");
    for (int i = 0; i < 200 && (cell_hi - cell_lo) > 1e-3; ++i) {
        const double mid = 0.5 * (cell_lo + cell_hi);
        if (bw(mid) < edge_beamwidth_deg)
            cell_lo = mid;
        else
            cell_hi = mid;
    }
    const double f_max = 0.5 * (cell_lo + cell_hi);

    return FrequencyGrid(f_min, f_max, nfreq);
}

namespace {

KeyValueConfig base_defaults() {
    KeyValueConfig c;
    c.set("antenna.eps_r", "10.2");
    c.set("antenna.w_g", "0.0021");
    c.set("antenna.period", "0.0055");
    c.set("antenna.l_a", "0.2");
    c.set("antenna.alpha_over_k0", "0.01");
    c.set("antenna.c", "299792458");
    c.set("band.mode", "edge_beamwidth");
    c.set("band.edge_beamwidth_deg", "10.66");
    c.set("band.nfreq", "100");
    c.set("fov.lo", "-90");
    c.set("fov.hi", "90");
    c.set("sector.width_deg", "30");
    c.set("sector.grid_step_deg", "1");
    c.set("sector.overlap_deg", "0");
    c.set("sector.min_ns", "2");
    c.set("scenario.doas", "10.3,15.7,20.7");
    c.set("scenario.coherent", "true");
    c.set("bench.snr_db", "0,5,10,15,20");
    c.set("bench.trials", "100");
    c.set("bench.snapshots", "100");
    c.set("bench.methods", "sf_ongrid,sf_offgrid,fullfov_ongrid");
    c.set("bench.seed", "1");
    c.set("bench.threads", "1");
    c.set("bench.failure_budget", "0.1");
    c.set("est.activation_threshold", "0.05");
    c.set("est.merge_radius_deg", "1.0");
    c.set("est.beta_update", "ogsbi");
    c.set("sbl.max_iter", "500");
    c.set("sbl.tol", "1e-4");
    c.set("sbl.varsigma", "0.01");
    c.set("sbl.prior_c", "1e-4");
    c.set("sbl.prior_d", "1e-4");
    c.set("sbl.gamma_init", "1");
    c.set("sbl.prune_threshold", "1e-3");
    c.set("sbl.gamma_update", "regularized");
    c.set("sbl.sigma2_init_scale", "0.1");
    c.set("sbl.beta_burn_in", "12");
    c.set("sbl.beta_tol_factor", "0.01");
    return c;
}

}  // namespace

KeyValueConfig preset_config(const std::string& name) {
    KeyValueConfig c = base_defaults();
    if (name == "paper-fig2") {
        return c;
    }
    if (name == "paper-fig3") {
        // identical protocol; kept separate so runtime-focused runs can be
        // retargeted without touching the RMSE preset
        return c;
    }
    if (name == "paper-quoted-band") {
        // the band endpoints quoted alongside the antenna design; most of
        // this range sits outside the radiating condition of the model,
        // so it is kept only as a reference configuration
        c.set("band.mode", "explicit");
        c.set("band.f_min", "24e9");
        c.set("band.f_max", "27.29e9");
        return c;
    }
    if (name == "smoke") {
        c.set("bench.snr_db", "10");
        c.set("bench.trials", "3");
        c.set("bench.methods", "sf_ongrid,sf_offgrid");
        return c;
    }
    throw ConfigError("unknown preset '" + name + "'");
}

BenchConfig make_bench_config(const KeyValueConfig& cfg) {
    BenchConfig bc;

    bc.antenna.eps_r = cfg.get_double("antenna.eps_r", 10.2);
    bc.antenna.w_g = cfg.get_double("antenna.w_g", 0.0021);
    bc.antenna.period_p = cfg.get_double("antenna.period", 0.0055);
    bc.antenna.l_a = cfg.get_double("antenna.l_a", 0.2);
    bc.antenna.alpha_over_k0 = cfg.get_double("antenna.alpha_over_k0", 0.01);
    bc.antenna.c = cfg.get_double("antenna.c", 299792458.0);
    bc.antenna.validate();

    const int nfreq = cfg.get_int("band.nfreq", 100);
    const std::string band_mode = cfg.get_string("band.mode", "edge_beamwidth");
    if (band_mode == "edge_beamwidth") {
        bc.grid = derive_operating_band(bc.antenna, nfreq,
                                        cfg.get_double("band.edge_beamwidth_deg", 10.66));
    } else if (band_mode == "explicit") {
        bc.grid = FrequencyGrid(cfg.require_double("band.f_min"),
                                cfg.require_double("band.f_max"), nfreq);
    } else {
        throw ConfigError("band.mode must be 'edge_beamwidth' or 'explicit'");
    }

    bc.scenario.doas_deg = cfg.get_double_list("scenario.doas");
    bc.scenario.coherence = cfg.get_bool("scenario.coherent", true)
                                ? Coherence::kCoherent
                                : Coherence::kIncoherent;

    bc.snr_grid_db = cfg.get_double_list("bench.snr_db");
    bc.trials = cfg.get_int("bench.trials", 100);
    bc.snapshots = cfg.get_int("bench.snapshots", 100);
    for (const std::string& m : cfg.get_string_list("bench.methods"))
        bc.methods.push_back(method_from_name(m));
    bc.master_seed = cfg.get_u64("bench.seed", 1);
    bc.threads = cfg.get_int("bench.threads", 1);
    bc.failure_budget = cfg.get_double("bench.failure_budget", 0.1);

    EstimatorConfig& est = bc.estimator;
    est.activation_threshold = cfg.get_double("est.activation_threshold", 0.05);
    est.merge_radius_deg = cfg.get_double("est.merge_radius_deg", 1.0);
    if (cfg.has("est.k_known")) est.k_known = cfg.get_int("est.k_known", 0);
    const std::string bu = cfg.get_string("est.beta_update", "ogsbi");
    if (bu == "ogsbi")
        est.beta_update = BetaUpdate::kOgsbi;
    else if (bu == "paper")
        est.beta_update = BetaUpdate::kPaper;
    else
        throw ConfigError("est.beta_update must be 'ogsbi' or 'paper'");

    SblConfig& sbl = est.sbl;
    sbl.max_iter = cfg.get_int("sbl.max_iter", 500);
    sbl.tol = cfg.get_double("sbl.tol", 1e-4);
    sbl.varsigma = cfg.get_double("sbl.varsigma", 1e-2);
    sbl.gamma_prior_c = cfg.get_double("sbl.prior_c", 1e-4);
    sbl.gamma_prior_d = cfg.get_double("sbl.prior_d", 1e-4);
    sbl.gamma_init = cfg.get_double("sbl.gamma_init", 1.0);
    sbl.prune_threshold = cfg.get_double("sbl.prune_threshold", 1e-3);
    const std::string gu = cfg.get_string("sbl.gamma_update", "regularized");
    if (gu == "regularized")
        sbl.gamma_update = GammaUpdate::kRegularized;
    else if (gu == "em")
        sbl.gamma_update = GammaUpdate::kEm;
    else
        throw ConfigError("sbl.gamma_update must be 'regularized' or 'em'");
    sbl.sigma2_init_scale = cfg.get_double("sbl.sigma2_init_scale", 0.1);
    sbl.beta_burn_in = cfg.get_int("sbl.beta_burn_in", 12);
    sbl.beta_tol_factor = cfg.get_double("sbl.beta_tol_factor", 0.01);

    est.plan = plan_sectors(cfg.get_double("fov.lo", -90.0), cfg.get_double("fov.hi", 90.0),
                            cfg.get_double("sector.width_deg", 30.0),
                            cfg.get_double("sector.grid_step_deg", 1.0),
                            cfg.get_double("sector.overlap_deg", 0.0));
    assign_frequencies(est.plan, bc.antenna, bc.grid, cfg.get_int("sector.min_ns", 2));

    bc.validate();
    return bc;
}

KeyValueConfig resolve_config(const KeyValueConfig& cfg) {
    KeyValueConfig out = base_defaults();
    for (const auto& [k, v] : cfg.entries()) out.set(k, v);
    // materialize to validate and to freeze the derived band
    const BenchConfig bc = make_bench_config(out);
    out.set("band.mode", "explicit");
    out.set("band.f_min", format_exact(bc.grid.f_min_hz));
    out.set("band.f_max", format_exact(bc.grid.f_max_hz));
    return out;
}

}  // namespace lwadoa
