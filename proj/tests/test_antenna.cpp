#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lwadoa/antenna.hpp"
#include "lwadoa/rng.hpp"

using namespace lwadoa;

namespace {

AntennaParams paper;
const bool init = [] {
    paper = reference_antenna();
    return true;
}();

// Independent oracle: the cutoff expression evaluated step by step.
double cutoff_oracle(double c, double w_g, double eps_r) {
    return c / (2.0 * w_g * std::sqrt(eps_r));
}

}  // namespace

TEST_CASE("cutoff frequency matches the direct evaluation") {
    const double fc = cutoff_frequency(paper);
    CHECK(fc == doctest::Approx(cutoff_oracle(paper.c, paper.w_g, paper.eps_r)));
    // hand calculation: 299792458 / (2 * 0.0021 * sqrt(10.2)) ~ 22.35 GHz
    CHECK(std::abs(fc - 22.35e9) < 0.01e9);
}

TEST_CASE("cutoff scaling in eps_r and w_g") {
    AntennaParams p4 = paper;
    p4.eps_r *= 4.0;
    CHECK(cutoff_frequency(p4) == doctest::Approx(cutoff_frequency(paper) / 2.0));

    AntennaParams pw = paper;
    pw.w_g *= 2.0;
    CHECK(cutoff_frequency(pw) == doctest::Approx(cutoff_frequency(paper) / 2.0));
}

TEST_CASE("phase constant below and at cutoff") {
    const double fc = cutoff_frequency(paper);
    CHECK_THROWS_AS(phase_constant_beta0(paper, fc), BelowCutoffError);
    CHECK_THROWS_AS(phase_constant_beta0(paper, 0.5 * fc), BelowCutoffError);
    // boundary: beta0 -> 0 (like sqrt(2 delta)) as f -> fc (1 + delta)
    const double delta = 1e-9;
    const double k0 = 2.0 * kPi * fc * (1.0 + delta) / paper.c;
    const double scale = k0 * std::sqrt(paper.eps_r);
    CHECK(phase_constant_beta0(paper, fc * (1.0 + delta)) / scale ==
          doctest::Approx(std::sqrt(2.0 * delta)).epsilon(1e-3));
}

TEST_CASE("phase constant limits") {
    const double fc = cutoff_frequency(paper);
    // f -> infinity: beta0/k0 -> sqrt(eps_r)
    const double f = 1e6 * fc;
    const double k0 = 2.0 * kPi * f / paper.c;
    CHECK(phase_constant_beta0(paper, f) / k0 ==
          doctest::Approx(std::sqrt(paper.eps_r)).epsilon(1e-9));

    // f = 2 fc: beta0 = k0 sqrt(eps_r) sqrt(3)/2
    const double f2 = 2.0 * fc;
    const double k02 = 2.0 * kPi * f2 / paper.c;
    CHECK(phase_constant_beta0(paper, f2) ==
          doctest::Approx(k02 * std::sqrt(paper.eps_r) * std::sqrt(3.0) / 2.0));
}

TEST_CASE("complex wavenumber") {
    const double f = 28e9;
    SUBCASE("zero leakage is purely real") {
        AntennaParams p0 = paper;
        p0.alpha_over_k0 = 0.0;
        CHECK(wavenumber_kz(p0, f).imag() == 0.0);
    }
    SUBCASE("imaginary part is -alpha") {
        const double k0 = 2.0 * kPi * f / paper.c;
        CHECK(wavenumber_kz(paper, f).imag() == doctest::Approx(-0.01 * k0));
    }
    SUBCASE("real part vanishes at broadside") {
        const double fc = cutoff_frequency(paper);
        const double f_bs = broadside_frequency(paper, fc * 1.001, fc * 3.0);
        CHECK(std::abs(wavenumber_kz(paper, f_bs).real()) < 1e-3);
    }
}

TEST_CASE("beam angle basics") {
    const double fc = cutoff_frequency(paper);
    const double f_bs = broadside_frequency(paper, fc * 1.001, fc * 3.0);
    CHECK(beam_angle(paper, f_bs).value() == doctest::Approx(0.0).epsilon(1e-6));

    // at the band endpoints quoted with the design, beta/k0 is ~ -1.11,
    // outside the radiating condition
    CHECK_FALSE(beam_angle(paper, 24e9).has_value());
    CHECK(beam_angle(paper, 27e9).has_value());
}

TEST_CASE("beam angle strictly increases over the radiating band") {
    const double fc = cutoff_frequency(paper);
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);
    double prev = -1e9;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        const double f = lo + (hi - lo) * i / n;
        const auto th = beam_angle(paper, f);
        REQUIRE(th.has_value());
        CHECK(*th > prev);
        prev = *th;
    }
}

TEST_CASE("invert_beam_angle round trips") {
    const double fc = cutoff_frequency(paper);
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);
    const double f_lo = lo + 1e6, f_hi = hi - 1e6;

    Rng rng(42);
    for (int i = 0; i < 50; ++i) {
        const double f = f_lo + (f_hi - f_lo) * rng.uniform();
        const double th = beam_angle(paper, f).value();
        const double f_back = invert_beam_angle(paper, th, f_lo, f_hi);
        CHECK(std::abs(beam_angle(paper, f_back).value() - th) < 1e-6);
        CHECK(std::abs(f_back - f) / f < 1e-3);
    }

    const double f_bs = broadside_frequency(paper, fc * 1.001, fc * 3.0);
    CHECK(invert_beam_angle(paper, 0.0, f_lo, f_hi) == doctest::Approx(f_bs).epsilon(1e-9));

    CHECK_THROWS_AS(invert_beam_angle(paper, 89.99, f_lo, f_hi), OutOfBandError);
    CHECK_THROWS_AS(invert_beam_angle(paper, -89.99, f_lo, f_hi), OutOfBandError);
}

TEST_CASE("steering response at the main beam with no leakage") {
    AntennaParams p0 = paper;
    p0.alpha_over_k0 = 0.0;
    const double fc = cutoff_frequency(p0);
    const double f = broadside_frequency(p0, fc * 1.001, fc * 3.0) * 1.05;
    const double th = beam_angle(p0, f).value();
    // u = 0 exactly at the beam angle: response equals the aperture length
    const Cplx a = steering_response(p0, f, th);
    CHECK(a.real() == doctest::Approx(p0.l_a).epsilon(1e-9));
    CHECK(std::abs(a.imag()) < 1e-12);

    // |a| <= l_a everywhere for real u
    for (double ang = -90.0; ang <= 90.0; ang += 0.37)
        CHECK(std::abs(steering_response(p0, f, ang)) <= p0.l_a * (1.0 + 1e-12));
}

TEST_CASE("steering response is continuous across the series switch") {
    // scan angles until |u| crosses 1e-4 and compare both branches nearby
    AntennaParams p0 = paper;
    p0.alpha_over_k0 = 0.0;
    const double f = 30e9;
    const double th0 = beam_angle(p0, f).value();
    const double k0 = 2.0 * kPi * f / p0.c;

    // angles giving |u| just below and just above the switch; the points
    // sit 2e-11 apart in u so any genuine branch jump would dominate the
    // physical variation between them
    const double du_dth = std::abs(-k0 * std::cos(deg2rad(th0)) * p0.l_a / 2.0);
    const double dth_deg = rad2deg(1e-4 / du_dth);
    const Cplx below = steering_response(p0, f, th0 + (1.0 - 1e-7) * dth_deg);
    const Cplx above = steering_response(p0, f, th0 + (1.0 + 1e-7) * dth_deg);
    CHECK(std::abs(below - above) / std::abs(above) < 1e-10);

    // derivative branches agree the same way
    const Cplx d_below = steering_derivative(p0, f, th0 + (1.0 - 1e-7) * dth_deg);
    const Cplx d_above = steering_derivative(p0, f, th0 + (1.0 + 1e-7) * dth_deg);
    CHECK(std::abs(d_below - d_above) / std::abs(d_above) < 1e-8);
}

TEST_CASE("pattern peaks near the beam angle") {
    // normalized |a|^2 peaks within half the local beamwidth of theta0
    const double fc = cutoff_frequency(paper);
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);
    for (double f = lo * 1.01; f < hi * 0.99; f += (hi - lo) / 7.0) {
        const auto th0 = beam_angle(paper, f);
        if (!th0 || std::abs(*th0) >= 60.0) continue;
        double best_ang = -90.0, best = -1.0;
        for (double ang = -90.0; ang <= 90.0; ang += 0.01) {
            const double g = std::norm(steering_response(paper, f, ang));
            if (g > best) {
                best = g;
                best_ang = ang;
            }
        }
        CHECK(std::abs(best_ang - *th0) < 0.5 * beamwidth_3db(paper, f));
    }
}

TEST_CASE("steering derivative against central finite differences") {
    const double fc = cutoff_frequency(paper);
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);
    Rng rng(7);
    const double h = 1e-5;  // radians
    for (int i = 0; i < 100; ++i) {
        const double f = (lo + 1e6) + (hi - lo - 2e6) * rng.uniform();
        const double th = -89.0 + 178.0 * rng.uniform();
        const Cplx an = steering_derivative(paper, f, th);
        const Cplx fd = (steering_response(paper, f, th + rad2deg(h)) -
                         steering_response(paper, f, th - rad2deg(h))) /
                        (2.0 * h);
        CHECK(std::abs(an - fd) / std::abs(fd) < 1e-6);
    }
}

TEST_CASE("steering derivative at the u = 0 point and at endfire") {
    AntennaParams p0 = paper;
    p0.alpha_over_k0 = 0.0;
    const double f = 30e9;
    const double th0 = beam_angle(p0, f).value();

    const double h = 1e-5;
    const Cplx an = steering_derivative(p0, f, th0);
    const Cplx fd = (steering_response(p0, f, th0 + rad2deg(h)) -
                     steering_response(p0, f, th0 - rad2deg(h))) /
                    (2.0 * h);
    CHECK(std::abs(an - fd) / std::abs(fd) < 1e-6);

    // cos(90 deg) = 0 kills du/dtheta and with it the derivative
    // (down to the rounding of cos(pi/2), ~6e-17)
    CHECK(std::abs(steering_derivative(paper, f, 90.0)) < 1e-12);
    CHECK(std::abs(steering_derivative(paper, f, -90.0)) < 1e-12);
}

TEST_CASE("beamwidth formula") {
    const double fc = cutoff_frequency(paper);
    const double f_bs = broadside_frequency(paper, fc * 1.001, fc * 3.0);
    const double lambda = paper.c / f_bs;
    CHECK(beamwidth_3db(paper, f_bs) ==
          doctest::Approx(kDegPerRad * lambda / paper.l_a));

    // at theta0 = 60 deg the width doubles relative to broadside at the
    // same wavelength
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);
    const double f60 = invert_beam_angle(paper, 60.0, lo + 1e6, hi - 1e6);
    const double lambda60 = paper.c / f60;
    CHECK(beamwidth_3db(paper, f60) ==
          doctest::Approx(2.0 * kDegPerRad * lambda60 / paper.l_a).epsilon(1e-6));

    // identity B(f) cos(theta0) = (180/pi) lambda / l_a over a sweep, and
    // the width grows with |theta0| at fixed wavelength by the same identity
    for (double f = lo * 1.01; f < hi * 0.99; f += (hi - lo) / 11.0) {
        const auto th = beam_angle(paper, f);
        if (!th) continue;
        const double expected = kDegPerRad * (paper.c / f) / paper.l_a;
        CHECK(beamwidth_3db(paper, f) * std::cos(deg2rad(*th)) ==
              doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("radiating band endpoints") {
    const double fc = cutoff_frequency(paper);
    const auto [lo, hi] = radiating_band(paper, fc * 1.001, fc * 3.0);

    // both crossings live inside the search window for this design
    CHECK(lo > fc * 1.001);
    CHECK(hi < fc * 3.0);

    // ratio is ~ +-1 at the located endpoints
    auto ratio = [&](double f) {
        return phase_constant(paper, f) / (2.0 * kPi * f / paper.c);
    };
    CHECK(ratio(lo) == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(ratio(hi) == doctest::Approx(1.0).epsilon(1e-6));

    SUBCASE("interval strictly inside is returned unchanged") {
        const auto [a, b] = radiating_band(paper, lo + 1e9, hi - 1e9);
        CHECK(a == lo + 1e9);
        CHECK(b == hi - 1e9);
    }
    SUBCASE("straddling interval stops at the crossing") {
        const auto [a, b] = radiating_band(paper, lo - 1e8, lo + 1e9);
        CHECK(std::abs(a - lo) < 1e3);
        CHECK(b == lo + 1e9);
    }
    SUBCASE("no radiating point") {
        CHECK_THROWS_AS(radiating_band(paper, fc * 1.001, lo - 1e8),
                        NoRadiatingFrequencyError);
    }
}

TEST_CASE("invalid antenna parameters are rejected") {
    AntennaParams bad = paper;
    bad.eps_r = 0.5;
    CHECK_THROWS_AS(bad.validate(), InvalidParamsError);
    bad = paper;
    bad.w_g = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParamsError);
    bad = paper;
    bad.l_a = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParamsError);
}
