#include "lwadoa/antenna.hpp"

#include <cmath>

namespace lwadoa {

namespace {

// Unnormalized sinc of a complex argument. Below |u| = 1e-4 the direct
// quotient loses digits to cancellation, so a Taylor series is used; the
// two branches agree to ~1e-25 relative at the switch point.
Cplx sinc_c(Cplx u) {
    if (std::abs(u) < 1e-4) {
        const Cplx u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

// d/du of sinc_c: cos(u)/u - sin(u)/u^2, series -u/3 + u^3/30 near zero.
Cplx sinc_prime_c(Cplx u) {
    if (std::abs(u) < 1e-4) {
        const Cplx u2 = u * u;
        return -u / 3.0 + u * u2 / 30.0;
    }
    return std::cos(u) / u - std::sin(u) / (u * u);
}

double wavenumber_k0(const AntennaParams& p, double f_hz) {
    return 2.0 * kPi * f_hz / p.c;
}

}  // namespace

void AntennaParams::validate() const {
    if (!(eps_r > 1.0)) throw InvalidParamsError("eps_r must exceed 1");
    if (!(w_g > 0.0)) throw InvalidParamsError("w_g must be positive");
    if (!(period_p > 0.0)) throw InvalidParamsError("period_p must be positive");
    if (!(l_a > 0.0)) throw InvalidParamsError("l_a must be positive");
    if (!(alpha_over_k0 >= 0.0)) throw InvalidParamsError("alpha_over_k0 must be nonnegative");
    if (!(c > 0.0)) throw InvalidParamsError("c must be positive");
    if (!std::isfinite(cutoff_frequency(*this))) throw InvalidParamsError("cutoff frequency not finite");
}

double cutoff_frequency(const AntennaParams& params) {
    return params.c / (2.0 * params.w_g * std::sqrt(params.eps_r));
}

double phase_constant_beta0(const AntennaParams& params, double f_hz) {
    const double fc = cutoff_frequency(params);
    if (f_hz <= fc) throw BelowCutoffError("frequency at or below cutoff");
    const double ratio = fc / f_hz;
    return wavenumber_k0(params, f_hz) * std::sqrt(params.eps_r) *
           std::sqrt(1.0 - ratio * ratio);
}

double phase_constant(const AntennaParams& params, double f_hz) {
    return phase_constant_beta0(params, f_hz) - 2.0 * kPi / params.period_p;
}

Cplx wavenumber_kz(const AntennaParams& params, double f_hz) {
    const double alpha = params.alpha_over_k0 * wavenumber_k0(params, f_hz);
    return {phase_constant(params, f_hz), -alpha};
}

BeamAngleResult beam_angle(const AntennaParams& params, double f_hz) {
    const double r = phase_constant(params, f_hz) / wavenumber_k0(params, f_hz);
    if (std::abs(r) > 1.0) return std::nullopt;
    return rad2deg(std::asin(r));
}

double invert_beam_angle(const AntennaParams& params, double theta_deg,
                         double f_lo_hz, double f_hi_hz) {
    const BeamAngleResult lo = beam_angle(params, f_lo_hz);
    const BeamAngleResult hi = beam_angle(params, f_hi_hz);
    if (!lo || !hi) throw OutOfBandError("band endpoint is not radiating");
    if (theta_deg < *lo || theta_deg > *hi)
        throw OutOfBandError("target angle outside the band's angular span");

    // theta0(f) is strictly increasing over the radiating band, so plain
    // bisection on the angle error converges.
    double a = f_lo_hz, b = f_hi_hz;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        const double th = beam_angle(params, mid).value();
        if (std::abs(th - theta_deg) < 1e-7 || (b - a) < 1e-6) return mid;
        if (th < theta_deg)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

Cplx steering_response(const AntennaParams& params, double f_hz,
                       double theta_deg) {
    const double k0 = wavenumber_k0(params, f_hz);
    const Cplx u = (wavenumber_kz(params, f_hz) - k0 * std::sin(deg2rad(theta_deg))) *
                   (params.l_a / 2.0);
    return params.l_a * std::exp(Cplx(0.0, -1.0) * u) * sinc_c(u);
}

Cplx steering_derivative(const AntennaParams& params, double f_hz,
                         double theta_deg) {
    const double k0 = wavenumber_k0(params, f_hz);
    const double th = deg2rad(theta_deg);
    const Cplx u = (wavenumber_kz(params, f_hz) - k0 * std::sin(th)) *
                   (params.l_a / 2.0);
    const double du_dtheta = -k0 * std::cos(th) * params.l_a / 2.0;
    const Cplx j(0.0, 1.0);
    return params.l_a * std::exp(-j * u) * (-j * sinc_c(u) + sinc_prime_c(u)) *
           du_dtheta;
}

double beamwidth_3db(const AntennaParams& params, double f_hz) {
    const BeamAngleResult th = beam_angle(params, f_hz);
    if (!th) throw NonRadiatingError("no main beam at this frequency");
    if (std::abs(std::abs(*th) - 90.0) < 1e-6)
        throw DivergentBeamwidthError("beamwidth diverges at endfire");
    const double lambda = params.c / f_hz;
    return kDegPerRad * lambda / (params.l_a * std::cos(deg2rad(*th)));
}

double broadside_frequency(const AntennaParams& params, double f_lo_hz,
                           double f_hi_hz) {
    const auto [a0, b0] = radiating_band(params, f_lo_hz, f_hi_hz);
    double a = a0, b = b0;
    double fa = phase_constant(params, a);
    if (fa > 0.0 || phase_constant(params, b) < 0.0)
        throw OutOfBandError("broadside not bracketed by the radiating band");
    for (int i = 0; i < 200 && (b - a) > 1e-6; ++i) {
        const double mid = 0.5 * (a + b);
        if (phase_constant(params, mid) < 0.0)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

std::pair<double, double> radiating_band(const AntennaParams& params,
                                         double f_lo_hz, double f_hi_hz) {
    const double fc = cutoff_frequency(params);
    if (!(f_hi_hz > f_lo_hz && f_lo_hz > fc))
        throw BelowCutoffError("band must lie above cutoff with f_hi > f_lo");

    // |beta/k0| - 1 changes sign at most twice; beta/k0 is strictly
    // increasing in f, so the radiating set within the interval is a
    // single sub-interval.
    auto ratio = [&](double f) { return phase_constant(params, f) / wavenumber_k0(params, f); };

    const int kScan = 4096;
    double first = -1.0, last = -1.0;
    double prev_f = f_lo_hz;
    bool prev_in = std::abs(ratio(prev_f)) <= 1.0;
    if (prev_in) first = prev_f;
    for (int i = 1; i <= kScan; ++i) {
        const double f = f_lo_hz + (f_hi_hz - f_lo_hz) * i / kScan;
        const bool in = std::abs(ratio(f)) <= 1.0;
        if (in && first < 0.0) {
            // refine the entry point on [prev_f, f]
            double a = prev_f, b = f;
            while (b - a > 0.5) {
                const double mid = 0.5 * (a + b);
                if (std::abs(ratio(mid)) <= 1.0)
                    b = mid;
                else
                    a = mid;
            }
            first = b;
        }
        if (!in && prev_in && first >= 0.0 && last < 0.0) {
            // refine the exit point on [prev_f, f]
            double a = prev_f, b = f;
            while (b - a > 0.5) {
                const double mid = 0.5 * (a + b);
                if (std::abs(ratio(mid)) <= 1.0)
                    a = mid;
                else
                    b = mid;
            }
            last = a;
        }
        prev_f = f;
        prev_in = in;
    }
    if (first < 0.0) throw NoRadiatingFrequencyError("no radiating frequency in the interval");
    if (last < 0.0) last = f_hi_hz;
    return {first, last};
}

AntennaParams reference_antenna() {
    AntennaParams p;
    p.eps_r = 10.2;
    p.w_g = 2.1e-3;
    p.period_p = 5.5e-3;
    p.l_a = 0.20;
    p.alpha_over_k0 = 0.01;
    p.validate();
    return p;
}

}  // namespace lwadoa
