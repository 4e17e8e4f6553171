#include "lwadoa/signal.hpp"

#include <cmath>
#include <limits>

#include "lwadoa/rng.hpp"

namespace lwadoa {

FrequencyGrid::FrequencyGrid(double f_min, double f_max, int count)
    : f_min_hz(f_min), f_max_hz(f_max), n(count) {
    if (!(f_max_hz > f_min_hz) || n < 2)
        throw InvalidParamsError("frequency grid needs f_max > f_min and n >= 2");
}

std::vector<double> FrequencyGrid::frequencies() const {
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = frequency(i);
    return f;
}

void SourceScenario::validate(int n_freq) const {
    if (doas_deg.empty()) throw InvalidParamsError("scenario needs at least one source");
    if (k() >= n_freq) throw InvalidParamsError("source count must be below the frequency count");
    for (double d : doas_deg)
        if (d < -90.0 || d > 90.0) throw InvalidParamsError("DoA outside [-90, 90]");
    if (!gains.empty() && static_cast<int>(gains.size()) != k())
        throw InvalidParamsError("gains size must match source count");
}

MatC build_steering_matrix(const AntennaParams& params, const FrequencyGrid& grid,
                           const std::vector<double>& angles_deg) {
    MatC a(grid.n, static_cast<int>(angles_deg.size()));
    for (int i = 0; i < grid.n; ++i) {
        const double f = grid.frequency(i);
        for (int k = 0; k < a.cols(); ++k)
            a(i, k) = steering_response(params, f, angles_deg[static_cast<std::size_t>(k)]);
    }
    return a;
}

MatC generate_sources(const SourceScenario& scenario, int t, std::uint64_t seed) {
    if (t < 1) throw InvalidParamsError("snapshot count must be at least 1");
    const int k = scenario.k();
    Rng rng(seed);
    MatC x(k, t);
    if (scenario.coherence == Coherence::kCoherent) {
        std::vector<Cplx> gains = scenario.gains;
        if (gains.empty()) {
            gains.resize(static_cast<std::size_t>(k));
            for (auto& g : gains) g = rng.unit_phase();
        }
        for (int j = 0; j < t; ++j) {
            const Cplx s = rng.cgaussian();
            for (int i = 0; i < k; ++i) x(i, j) = gains[static_cast<std::size_t>(i)] * s;
        }
    } else {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < t; ++j) x(i, j) = rng.cgaussian();
    }
    return x;
}

double snr_to_noise_variance(const MatC& a, const MatC& x, double snr_db) {
    const MatC s = a * x;
    const double mean_power = s.squaredNorm() / static_cast<double>(s.size());
    if (mean_power <= 0.0) throw ZeroSignalError("signal has zero power");
    return mean_power / std::pow(10.0, snr_db / 10.0);
}

SimulationOutput simulate_snapshots(const AntennaParams& params,
                                    const FrequencyGrid& grid,
                                    const SourceScenario& scenario, int t,
                                    double snr_db, std::uint64_t seed) {
    scenario.validate(grid.n);
    const MatC a = build_steering_matrix(params, grid, scenario.doas_deg);
    const MatC x = generate_sources(scenario, t, derive_seed(seed, "sources"));

    SimulationOutput out;
    out.y.data = a * x;
    if (std::isinf(snr_db)) {
        out.noise_variance = 0.0;
        return out;
    }
    out.noise_variance = snr_to_noise_variance(a, x, snr_db);
    Rng rng(derive_seed(seed, "noise"));
    for (int i = 0; i < out.y.data.rows(); ++i)
        for (int j = 0; j < out.y.data.cols(); ++j)
            out.y.data(i, j) += rng.cgaussian(out.noise_variance);
    return out;
}

MatC sample_covariance(const SnapshotMatrix& y) {
    const double t = static_cast<double>(y.snapshots());
    MatC r = (y.data * y.data.adjoint()) / t;
    // enforce exact Hermitian symmetry against rounding
    r = Cplx(0.5, 0.0) * (r + r.adjoint().eval());
    return r;
}

}  // namespace lwadoa
