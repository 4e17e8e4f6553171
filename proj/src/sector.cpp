#include "lwadoa/sector.hpp"

#include <algorithm>
#include <cmath>

namespace lwadoa {

double sector_width_from_beamwidth(double gamma_width, double b_max_deg) {
    if (!(gamma_width > 1.0))
        throw GammaTooSmallError("sector-width factor must exceed 1");
    if (!(b_max_deg > 0.0)) throw InvalidParamsError("beamwidth must be positive");
    return gamma_width * b_max_deg;
}

double max_beamwidth(const AntennaParams& params, const FrequencyGrid& grid) {
    double best = -1.0;
    for (int i = 0; i < grid.n; ++i) {
        const double f = grid.frequency(i);
        if (!beam_angle(params, f)) continue;
        best = std::max(best, beamwidth_3db(params, f));
    }
    if (best < 0.0)
        throw NoRadiatingFrequencyError("no radiating frequency in the grid");
    return best;
}

SectorPlan plan_sectors(double fov_lo_deg, double fov_hi_deg, double w_theta_deg,
                        double delta_theta_deg, double overlap_deg) {
    const double span = fov_hi_deg - fov_lo_deg;
    if (!(span >= w_theta_deg) || !(w_theta_deg > 0.0))
        throw InvalidFovError("FoV span must cover at least one sector width");
    if (!(delta_theta_deg > 0.0)) throw InvalidFovError("grid step must be positive");
    if (overlap_deg < 0.0) throw InvalidFovError("overlap must be nonnegative");

    SectorPlan plan;
    plan.fov_lo_deg = fov_lo_deg;
    plan.fov_hi_deg = fov_hi_deg;
    plan.w_theta_deg = w_theta_deg;
    plan.overlap_deg = overlap_deg;

    const int l = static_cast<int>(std::ceil(span / w_theta_deg - 1e-12));
    for (int s = 0; s < l; ++s) {
        Sector sec;
        sec.index = s;
        const bool last = (s == l - 1);
        sec.theta_lo_deg = std::max(fov_lo_deg, fov_lo_deg + s * w_theta_deg - overlap_deg);
        sec.theta_hi_deg = last ? fov_hi_deg
                                : std::min(fov_hi_deg, fov_lo_deg + (s + 1) * w_theta_deg + overlap_deg);
        sec.grid_step_deg = delta_theta_deg;
        // closed on the left, open on the right except for the last sector
        const double hi_slack = last ? 1e-9 : -1e-9;
        for (double a = sec.theta_lo_deg; a <= sec.theta_hi_deg + hi_slack; a += delta_theta_deg)
            sec.grid_deg.push_back(a);
        plan.sectors.push_back(std::move(sec));
    }
    return plan;
}

std::pair<int, int> select_frequencies(const Sector& sector,
                                       const AntennaParams& params,
                                       const FrequencyGrid& grid, int min_ns) {
    // Beam angles per grid index; nullopt where not radiating.
    std::vector<BeamAngleResult> th(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) th[static_cast<std::size_t>(i)] = beam_angle(params, grid.frequency(i));

    int lo = -1, hi = -1;
    for (int i = 0; i < grid.n; ++i) {
        const auto& t = th[static_cast<std::size_t>(i)];
        if (t && *t >= sector.theta_lo_deg && *t <= sector.theta_hi_deg) {
            if (lo < 0) lo = i;
            hi = i;
        }
    }
    if (lo < 0) throw EmptySectorError("no radiating frequency maps into the sector");

    // Symmetric expansion over adjacent radiating indices up to min_ns.
    auto radiating = [&](int i) { return i >= 0 && i < grid.n && th[static_cast<std::size_t>(i)].has_value(); };
    bool below_next = true;
    while (hi - lo + 1 < min_ns) {
        const bool can_down = radiating(lo - 1);
        const bool can_up = radiating(hi + 1);
        if (!can_down && !can_up) break;
        if (below_next && can_down)
            --lo;
        else if (can_up)
            ++hi;
        else if (can_down)
            --lo;
        below_next = !below_next;
    }
    return {lo, hi};
}

void assign_frequencies(SectorPlan& plan, const AntennaParams& params,
                        const FrequencyGrid& grid, int min_ns) {
    for (Sector& sec : plan.sectors) {
        try {
            const int natural_lo = sec.freq_index_lo;
            (void)natural_lo;
            auto [lo, hi] = select_frequencies(sec, params, grid, min_ns);
            sec.freq_index_lo = lo;
            sec.freq_index_hi = hi;
            // detect whether expansion pulled in out-of-sector beams
            const auto t_lo = beam_angle(params, grid.frequency(lo));
            const auto t_hi = beam_angle(params, grid.frequency(hi));
            sec.expanded = !(t_lo && t_hi && *t_lo >= sec.theta_lo_deg - 1e-12 &&
                             *t_hi <= sec.theta_hi_deg + 1e-12);
        } catch (const EmptySectorError&) {
            sec.freq_index_lo = sec.freq_index_hi = -1;
        }
    }
}

SectorDictionary build_sector_dictionary(const AntennaParams& params,
                                         const FrequencyGrid& grid,
                                         const Sector& sector) {
    if (!sector.has_frequencies())
        throw EmptySectorError("sector has no assigned frequencies");
    const int ns = sector.n_s();
    const int p = sector.p();
    SectorDictionary d;
    d.a.resize(ns, p);
    d.b.resize(ns, p);
    for (int i = 0; i < ns; ++i) {
        const double f = grid.frequency(sector.freq_index_lo + i);
        for (int q = 0; q < p; ++q) {
            const double ang = sector.grid_deg[static_cast<std::size_t>(q)];
            d.a(i, q) = steering_response(params, f, ang);
            d.b(i, q) = steering_derivative(params, f, ang) * kRadPerDeg;
        }
    }
    return d;
}

}  // namespace lwadoa
