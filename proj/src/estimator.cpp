#include "lwadoa/estimator.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace lwadoa {

void EstimatorConfig::validate() const {
    if (!(activation_threshold > 0.0) || !(activation_threshold < 1.0))
        throw InvalidParamsError("activation threshold must lie in (0, 1)");
    if (!(merge_radius_deg > 0.0))
        throw InvalidParamsError("merge radius must be positive");
    if (k_known && *k_known < 1)
        throw InvalidParamsError("k_known must be at least 1");
    sbl.validate();
}

SnapshotMatrix spatial_filter(const SnapshotMatrix& y, const Sector& sector) {
    if (!sector.has_frequencies() || sector.freq_index_hi >= y.rows())
        throw IndexOutOfRangeError("sector frequency range outside the snapshot matrix");
    SnapshotMatrix out;
    out.data = y.data.middleRows(sector.freq_index_lo, sector.n_s());
    return out;
}

std::vector<SectorCandidate> estimate_sector(const SnapshotMatrix& y,
                                             const Sector& sector,
                                             const AntennaParams& params,
                                             const FrequencyGrid& grid,
                                             const EstimatorConfig& config,
                                             std::vector<SpectrumPoint>* spectrum) {
    std::vector<SectorCandidate> out;
    if (!sector.has_frequencies()) return out;

    const SectorDictionary dict = build_sector_dictionary(params, grid, sector);
    const SnapshotMatrix ys = spatial_filter(y, sector);

    const bool offgrid = config.mode == EstimatorMode::kSfOffGrid;
    OffGridState state;
    if (offgrid) {
        state = run_offgrid(dict.a, dict.b, ys.data, config.sbl, config.beta_update,
                            sector.grid_step_deg);
    } else {
        static_cast<SblState&>(state) = run_ongrid(dict.a, ys.data, config.sbl);
        state.beta_deg = VecD::Zero(sector.p());
    }

    // Power spectrum: gamma weighted by the mean squared column response.
    VecD power(sector.p());
    for (int p = 0; p < sector.p(); ++p) {
        const double colpow = dict.a.col(p).squaredNorm() / static_cast<double>(sector.n_s());
        power[p] = state.gamma[p] * colpow;
        if (spectrum)
            spectrum->push_back({sector.index, sector.grid_deg[static_cast<std::size_t>(p)],
                                 state.gamma[p]});
    }

    for (int p = 0; p < sector.p(); ++p) {
        if (!(power[p] > 0.0)) continue;
        if (p > 0 && power[p] < power[p - 1]) continue;
        if (p + 1 < sector.p() && power[p] <= power[p + 1]) continue;
        SectorCandidate c;
        c.angle_deg = sector.grid_deg[static_cast<std::size_t>(p)] + state.beta_deg[p];
        c.gamma = state.gamma[p];
        c.sector_power = power[p];
        c.sector = sector.index;
        c.refined = offgrid;
        out.push_back(c);
    }
    return out;
}

std::vector<DoaEstimate> merge_deduplicate(std::vector<DoaEstimate> candidates,
                                           double merge_radius_deg,
                                           std::optional<int> k_known) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const DoaEstimate& a, const DoaEstimate& b) {
                         return a.weight > b.weight;
                     });
    std::vector<DoaEstimate> accepted;
    for (const DoaEstimate& c : candidates) {
        bool absorbed = false;
        for (const DoaEstimate& a : accepted)
            if (std::abs(c.angle_deg - a.angle_deg) <= merge_radius_deg) {
                absorbed = true;
                break;
            }
        if (!absorbed) accepted.push_back(c);
    }
    if (k_known && static_cast<int>(accepted.size()) > *k_known)
        accepted.resize(static_cast<std::size_t>(*k_known));
    std::sort(accepted.begin(), accepted.end(),
              [](const DoaEstimate& a, const DoaEstimate& b) {
                  return a.angle_deg < b.angle_deg;
              });
    return accepted;
}

namespace {

// Residual of the least-squares fit of Y onto the given columns.
double lstsq_residual(const MatC& a, const MatC& y) {
    if (a.cols() == 0) return y.squaredNorm();
    MatC gram = a.adjoint() * a;
    const double jitter = 1e-12 * gram.real().trace() / static_cast<double>(a.cols());
    for (int j = 0; j < a.cols(); ++j) gram(j, j) += jitter;
    const MatC x = Eigen::LDLT<MatC>(gram).solve(a.adjoint() * y);
    return (y - a * x).squaredNorm();
}

// Weights candidates by the full-band residual energy each one removes
// from the joint least-squares fit. Per-sector gamma is not comparable
// across sectors (column norms differ and sidelobe leakage can be fit
// with confident gamma at high SNR), and single-candidate matched power
// is corrupted by coherent cross-terms; the leave-one-out reduction
// measures explained energy directly and is robust to both.
std::vector<DoaEstimate> score_candidates(const std::vector<DoaEstimate>& cands,
                                          const SnapshotMatrix& y,
                                          const AntennaParams& params,
                                          const FrequencyGrid& grid) {
    std::vector<DoaEstimate> scored = cands;
    if (cands.empty()) return scored;

    const int m = static_cast<int>(cands.size());
    const double nt = static_cast<double>(y.data.size());
    std::vector<double> angles(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) angles[static_cast<std::size_t>(j)] = cands[static_cast<std::size_t>(j)].angle_deg;
    const MatC a = build_steering_matrix(params, grid, angles);

    const double r_full = lstsq_residual(a, y.data);
    for (int j = 0; j < m; ++j) {
        MatC a_wo(a.rows(), m - 1);
        for (int q = 0, col = 0; q < m; ++q)
            if (q != j) a_wo.col(col++) = a.col(q);
        const double r_wo = lstsq_residual(a_wo, y.data);
        scored[static_cast<std::size_t>(j)].weight = std::max(r_wo - r_full, 0.0) / nt;
    }
    return scored;
}

Sector full_fov_sector(const FrequencyGrid& grid, const SectorPlan& plan,
                       double grid_step_deg) {
    Sector s;
    s.index = 0;
    s.theta_lo_deg = plan.fov_lo_deg;
    s.theta_hi_deg = plan.fov_hi_deg;
    s.grid_step_deg = grid_step_deg;
    for (double ang = s.theta_lo_deg; ang <= s.theta_hi_deg + 1e-9; ang += grid_step_deg)
        s.grid_deg.push_back(ang);
    s.freq_index_lo = 0;
    s.freq_index_hi = grid.n - 1;
    return s;
}

}  // namespace

std::vector<DoaEstimate> estimate(const SnapshotMatrix& y, const AntennaParams& params,
                                  const FrequencyGrid& grid, const EstimatorConfig& config,
                                  std::vector<SpectrumPoint>* spectrum) {
    config.validate();

    std::vector<SectorCandidate> cands;
    if (config.mode == EstimatorMode::kFullFovOnGrid) {
        const double step = config.plan.sectors.empty()
                                ? 1.0
                                : config.plan.sectors.front().grid_step_deg;
        const Sector fov = full_fov_sector(grid, config.plan, step);
        cands = estimate_sector(y, fov, params, grid, config, spectrum);
    } else {
        for (const Sector& sec : config.plan.sectors) {
            auto sc = estimate_sector(y, sec, params, grid, config, spectrum);
            cands.insert(cands.end(), sc.begin(), sc.end());
        }
    }

    // Near-duplicate candidates (sector seams, overlap mode) collapse
    // before scoring so the refit never sees collinear columns.
    std::vector<DoaEstimate> raw;
    for (const SectorCandidate& c : cands) {
        DoaEstimate e;
        e.angle_deg = c.angle_deg;
        e.weight = c.sector_power;
        e.gamma = c.gamma;
        e.sector = c.sector;
        e.refined = c.refined;
        raw.push_back(e);
    }
    const std::vector<DoaEstimate> clustered =
        merge_deduplicate(std::move(raw), config.merge_radius_deg, std::nullopt);

    std::vector<DoaEstimate> scored = score_candidates(clustered, y, params, grid);
    if (scored.empty()) return scored;

    double wmax = 0.0;
    for (const DoaEstimate& e : scored) wmax = std::max(wmax, e.weight);
    std::vector<DoaEstimate> kept;
    for (const DoaEstimate& e : scored)
        if (e.weight >= config.activation_threshold * wmax) kept.push_back(e);

    return merge_deduplicate(std::move(kept), config.merge_radius_deg, config.k_known);
}

}  // namespace lwadoa
