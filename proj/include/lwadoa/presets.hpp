#pragma once

#include <string>

#include "lwadoa/bench.hpp"
#include "lwadoa/io.hpp"

namespace lwadoa {

/// Frequency band over which the antenna scans, delimited by the points
/// where the 3-dB beamwidth grows back to edge_beamwidth_deg on both
/// sides of broadside. With the reference antenna and the default edge
/// beamwidth of 10.66 degrees this spans beam angles of roughly -71 to
/// +77 degrees and keeps the maximum in-band beamwidth at the edge value.
FrequencyGrid derive_operating_band(const AntennaParams& params, int nfreq,
                                    double edge_beamwidth_deg = 10.66);

/// Named experiment presets as editable key-value configs:
///   paper-fig2   RMSE-vs-SNR sweep (three coherent sources, all methods)
///   paper-fig3   runtime-vs-SNR sweep (same configuration)
///   smoke        small fast sweep for CI-style checks
KeyValueConfig preset_config(const std::string& name);

/// Builds the full Monte Carlo configuration (antenna, band, sectors,
/// estimator, sweep) from a key-value config, applying defaults for
/// every optional key.
BenchConfig make_bench_config(const KeyValueConfig& cfg);

/// Echo of the fully resolved configuration; parsing it back reproduces
/// the same BenchConfig.
KeyValueConfig resolve_config(const KeyValueConfig& cfg);

}  // namespace lwadoa
