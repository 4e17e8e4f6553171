#pragma once

#include <optional>

#include "lwadoa/types.hpp"

namespace lwadoa {

/// Physical description of a 1D periodic leaky-wave waveguide antenna.
/// Immutable after construction; all member functions of this module are
/// pure and safe to call concurrently.
struct AntennaParams {
    double eps_r;         // relative permittivity of the dielectric fill
    double w_g;           // waveguide width [m]
    double period_p;      // modulation period [m]
    double l_a;           // aperture length [m]
    double alpha_over_k0; // leakage ratio alpha/k0 (dimensionless)
    double c = 299792458.0; // propagation speed [m/s]

    void validate() const;
};

/// Main-beam direction at one frequency: an angle in degrees, or
/// no value when |beta/k0| > 1 and the antenna does not radiate.
using BeamAngleResult = std::optional<double>;

/// Waveguide cutoff frequency c / (2 w_g sqrt(eps_r)) [Hz].
double cutoff_frequency(const AntennaParams& params);

/// Unperturbed guided-mode phase constant beta0 [rad/m]. Throws
/// BelowCutoffError for f <= f_c.
double phase_constant_beta0(const AntennaParams& params, double f_hz);

/// Phase constant of the -1st spatial harmonic: beta = beta0 - 2*pi/p.
double phase_constant(const AntennaParams& params, double f_hz);

/// Complex longitudinal wavenumber k_z = beta - j*alpha.
Cplx wavenumber_kz(const AntennaParams& params, double f_hz);

/// Main-beam direction asin(beta/k0) in degrees, or nullopt outside the
/// radiating condition -k0 <= beta <= k0.
BeamAngleResult beam_angle(const AntennaParams& params, double f_hz);

/// Inverts the frequency-angle mapping by bisection over [f_lo, f_hi].
/// The result satisfies |beam_angle(f) - theta_deg| < 1e-6 degrees.
/// Throws OutOfBandError when theta_deg is outside the achievable span.
double invert_beam_angle(const AntennaParams& params, double theta_deg,
                         double f_lo_hz, double f_hi_hz);

/// Far-field response a_f(theta) = l_a e^{-ju} sinc(u) with
/// u = (k_z - k0 sin(theta)) l_a / 2 (complex u, unnormalized sinc).
Cplx steering_response(const AntennaParams& params, double f_hz,
                       double theta_deg);

/// Angular derivative d a_f / d theta in per-radian units.
Cplx steering_derivative(const AntennaParams& params, double f_hz,
                         double theta_deg);

/// 3-dB beamwidth (180/pi) * lambda / (l_a cos(theta0)) in degrees.
/// Throws NonRadiatingError when the beam condition fails and
/// DivergentBeamwidthError within 1e-6 degrees of endfire.
double beamwidth_3db(const AntennaParams& params, double f_hz);

/// Frequency where the beam crosses broadside (beta = 0), found by
/// bisection over the radiating part of [f_lo, f_hi].
double broadside_frequency(const AntennaParams& params, double f_lo_hz,
                           double f_hi_hz);

/// Sub-interval of [f_lo, f_hi] where |beta/k0| <= 1, endpoints located
/// by bisection. Throws NoRadiatingFrequencyError when empty.
std::pair<double, double> radiating_band(const AntennaParams& params,
                                         double f_lo_hz, double f_hi_hz);

/// LWA design used throughout the experiments: eps_r = 10.2,
/// W_g = 2.1 mm, p = 5.5 mm, l_a = 20 cm, alpha/k0 = 0.01.
AntennaParams reference_antenna();

}  // namespace lwadoa
