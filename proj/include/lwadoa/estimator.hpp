#pragma once

#include <optional>
#include <vector>

#include "lwadoa/sbl.hpp"
#include "lwadoa/sector.hpp"
#include "lwadoa/signal.hpp"

namespace lwadoa {

enum class EstimatorMode { kSfOnGrid, kSfOffGrid, kFullFovOnGrid };

struct DoaEstimate {
    double angle_deg = 0.0;
    double weight = 0.0;   // full-band explained power of the candidate
    double gamma = 0.0;    // converged SBL variance at the supporting grid point
    int sector = 0;
    bool refined = false;  // off-grid offset applied
};

/// One grid point of a sector's converged gamma spectrum.
struct SpectrumPoint {
    int sector = 0;
    double theta_deg = 0.0;
    double gamma = 0.0;
};

struct EstimatorConfig {
    EstimatorMode mode = EstimatorMode::kSfOffGrid;
    std::optional<int> k_known;
    double activation_threshold = 0.05;  // fraction of the max candidate weight
    double merge_radius_deg = 1.0;
    SblConfig sbl;
    BetaUpdate beta_update = BetaUpdate::kOgsbi;
    SectorPlan plan;  // frequency-assigned; ignored in full-FoV mode

    void validate() const;
};

/// Row slice [freq_index_lo .. freq_index_hi] of the snapshot matrix.
SnapshotMatrix spatial_filter(const SnapshotMatrix& y, const Sector& sector);

/// Raw per-sector candidate before global scoring.
struct SectorCandidate {
    double angle_deg = 0.0;
    double gamma = 0.0;
    double sector_power = 0.0;  // gamma weighted by the mean column power
    int sector = 0;
    bool refined = false;
};

/// Runs the configured SBL engine on one sector and extracts candidates
/// at the local maxima of the converged power spectrum gamma_p |a_p|^2.
/// Returns an empty list for sectors without assigned frequencies.
std::vector<SectorCandidate> estimate_sector(const SnapshotMatrix& y,
                                             const Sector& sector,
                                             const AntennaParams& params,
                                             const FrequencyGrid& grid,
                                             const EstimatorConfig& config,
                                             std::vector<SpectrumPoint>* spectrum = nullptr);

/// Greedy weight-descending clustering: the strongest candidate of each
/// cluster within merge_radius_deg is kept; with k_known the strongest K
/// clusters survive. Output sorted by angle.
std::vector<DoaEstimate> merge_deduplicate(std::vector<DoaEstimate> candidates,
                                           double merge_radius_deg,
                                           std::optional<int> k_known);

/// Full pipeline: per-sector SBL (or one full-FoV run), near-duplicate
/// clustering across sector seams, candidate weights from a full-band
/// least-squares refit (each candidate scored by the residual energy it
/// removes), global thresholding, final merge.
std::vector<DoaEstimate> estimate(const SnapshotMatrix& y, const AntennaParams& params,
                                  const FrequencyGrid& grid, const EstimatorConfig& config,
                                  std::vector<SpectrumPoint>* spectrum = nullptr);

}  // namespace lwadoa
