#pragma once

#include <vector>

#include "lwadoa/antenna.hpp"
#include "lwadoa/signal.hpp"
#include "lwadoa/types.hpp"

namespace lwadoa {

/// One angular sector with its candidate DoA grid and, once assigned,
/// the contiguous frequency-sample range whose main beams fall inside.
struct Sector {
    int index = 0;
    double theta_lo_deg = 0.0;
    double theta_hi_deg = 0.0;
    std::vector<double> grid_deg;   // strictly increasing candidate angles
    double grid_step_deg = 0.0;
    int freq_index_lo = -1;         // inclusive
    int freq_index_hi = -1;         // inclusive
    bool expanded = false;          // range grew to honor min_ns

    int p() const { return static_cast<int>(grid_deg.size()); }
    int n_s() const { return freq_index_hi - freq_index_lo + 1; }
    bool has_frequencies() const { return freq_index_lo >= 0; }
};

struct SectorPlan {
    std::vector<Sector> sectors;
    double fov_lo_deg = 0.0;
    double fov_hi_deg = 0.0;
    double w_theta_deg = 0.0;
    double gamma_width = 0.0;   // 0 when the width was given directly
    double overlap_deg = 0.0;

    int l() const { return static_cast<int>(sectors.size()); }
};

/// Sector width w = gamma * B_max. Requires gamma > 1 so the width
/// strictly exceeds the maximum beamwidth.
double sector_width_from_beamwidth(double gamma_width, double b_max_deg);

/// Max of beamwidth_3db over the radiating grid frequencies;
/// non-radiating samples are skipped.
double max_beamwidth(const AntennaParams& params, const FrequencyGrid& grid);

/// Tiles [fov_lo, fov_hi] with ceil(span / w_theta) sectors of width
/// w_theta (the last absorbs any remainder), each extended by
/// overlap_deg on both ends and clipped to the FoV. Sector grids are
/// arithmetic progressions with step delta_theta, closed on the left and
/// open on the right except for the last sector.
SectorPlan plan_sectors(double fov_lo_deg, double fov_hi_deg, double w_theta_deg,
                        double delta_theta_deg, double overlap_deg = 0.0);

/// Maximal contiguous frequency-index range with beam angles inside the
/// sector bounds. If fewer than min_ns indices qualify, the range grows
/// symmetrically over adjacent radiating indices until min_ns is reached.
/// Throws EmptySectorError when no radiating sample maps into the sector.
std::pair<int, int> select_frequencies(const Sector& sector,
                                       const AntennaParams& params,
                                       const FrequencyGrid& grid, int min_ns);

/// Runs select_frequencies for every sector in the plan. Sectors with no
/// radiating frequency keep freq_index_lo = -1 and are skipped downstream.
void assign_frequencies(SectorPlan& plan, const AntennaParams& params,
                        const FrequencyGrid& grid, int min_ns);

struct SectorDictionary {
    MatC a;  // N_s x P steering values
    MatC b;  // N_s x P angular derivatives, per degree
};

/// Steering and derivative matrices over the sector's selected
/// frequencies and grid angles. Derivatives are converted to per-degree
/// units so off-grid offsets live in the same units as the grid step.
SectorDictionary build_sector_dictionary(const AntennaParams& params,
                                         const FrequencyGrid& grid,
                                         const Sector& sector);

}  // namespace lwadoa
