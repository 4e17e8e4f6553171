#pragma once

#include <cstdint>
#include <vector>

#include "lwadoa/antenna.hpp"
#include "lwadoa/types.hpp"

namespace lwadoa {

/// N uniformly spaced frequency samples between f_min and f_max,
/// f_i = f_min + i * (f_max - f_min) / (n - 1).
struct FrequencyGrid {
    double f_min_hz = 0.0;
    double f_max_hz = 0.0;
    int n = 0;

    FrequencyGrid() = default;
    FrequencyGrid(double f_min, double f_max, int count);

    double step_hz() const { return (f_max_hz - f_min_hz) / (n - 1); }
    double frequency(int i) const { return f_min_hz + i * step_hz(); }
    std::vector<double> frequencies() const;
};

enum class Coherence { kCoherent, kIncoherent };

/// K plane-wave sources with fixed directions. Gains default to unit
/// modulus with per-trial seeded phases; pass explicit gains to pin them.
struct SourceScenario {
    std::vector<double> doas_deg;
    Coherence coherence = Coherence::kCoherent;
    std::vector<Cplx> gains;  // empty = draw unit-modulus phases per trial

    int k() const { return static_cast<int>(doas_deg.size()); }
    void validate(int n_freq) const;
};

/// Received data: rows are frequency samples, columns are snapshots.
struct SnapshotMatrix {
    MatC data;

    int rows() const { return static_cast<int>(data.rows()); }
    int snapshots() const { return static_cast<int>(data.cols()); }
};

/// N x K steering matrix; column k is the response to a source at
/// angles_deg[k] across the grid frequencies. No normalization is
/// applied, so column norms are frequency-dependent and unequal.
MatC build_steering_matrix(const AntennaParams& params, const FrequencyGrid& grid,
                           const std::vector<double>& angles_deg);

/// K x T source matrix. Incoherent rows are independent CN(0,1);
/// coherent rows share one CN(0,1) waveform scaled by per-source gains
/// (rank-1 source covariance).
MatC generate_sources(const SourceScenario& scenario, int t, std::uint64_t seed);

/// Noise variance realizing the requested SNR against the mean power of
/// the noise-free observation: sigma^2 = (|A X|_F^2 / (N T)) / 10^(snr/10).
double snr_to_noise_variance(const MatC& a, const MatC& x, double snr_db);

struct SimulationOutput {
    SnapshotMatrix y;
    double noise_variance = 0.0;
};

/// Y = A X + N with circular complex Gaussian noise calibrated by
/// snr_to_noise_variance. Pass snr_db = +infinity to disable noise.
/// Deterministic given the seed.
SimulationOutput simulate_snapshots(const AntennaParams& params,
                                    const FrequencyGrid& grid,
                                    const SourceScenario& scenario, int t,
                                    double snr_db, std::uint64_t seed);

/// Sample covariance (1/T) Y Y^H (Hermitian positive semidefinite).
MatC sample_covariance(const SnapshotMatrix& y);

}  // namespace lwadoa
