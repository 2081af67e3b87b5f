#include "doctest.h"

#include <cmath>

#include "frontlab/errors.hpp"
#include "frontlab/phase_plane.hpp"

using namespace frontlab;

namespace {

// Closed-form wave of the cubic, shifted so that phi(0) = a.
double closed_wave(double a, double z) {
    const double zs = -std::sqrt(2.0) * std::log(1.0 / a - 1.0);
    return 1.0 / (1.0 + std::exp((z - zs) / std::sqrt(2.0)));
}

}  // namespace

TEST_CASE("closed-form cubic wave solves the profile equation") {
    const double a = 0.25;
    const double c = (1 - 2 * a) / std::sqrt(2.0);
    const auto b = make_cubic(a);
    double worst = 0.0;
    for (double z = -30; z <= 30; z += 0.01) {
        // Analytic derivatives of the logistic profile.
        const double p = closed_wave(a, z);
        const double dp = -p * (1 - p) / std::sqrt(2.0);
        const double ddp = (1 - 2 * p) * p * (1 - p) / 2.0;
        worst = std::max(worst, std::abs(ddp + c * dp + b.f(p)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("wave speed and profile for the cubic") {
    const auto w = traveling_wave(make_cubic(0.25));
    CHECK(std::abs(w.speed - 0.3535534) < 1e-6);
    CHECK(w.value(0.0) == doctest::Approx(0.25).epsilon(1e-12));
    double worst = 0.0;
    for (double z = -20; z <= 20; z += 0.05) worst = std::max(worst, std::abs(w.value(z) - closed_wave(0.25, z)));
    CHECK(worst < 1e-5);
    for (std::size_t k = 1; k < w.phi.size(); ++k) {
        CHECK(w.phi[k] <= w.phi[k - 1]);
        if (w.phi[k - 1] > 1e-300 && w.phi[k - 1] < 1.0 - 1e-12) CHECK(w.phi[k] < w.phi[k - 1]);
    }
    CHECK(w.value(1e6) == 0.0);
    CHECK(w.value(-1e6) == 1.0);

    const auto w4 = traveling_wave(make_cubic(0.4));
    CHECK(std::abs(w4.speed - 0.1414214) < 1e-6);
}

TEST_CASE("wave speed is independent of the bisection window") {
    const auto b = make_cubic(0.3);
    const auto w1 = traveling_wave(b, 60.0);
    const auto w2 = traveling_wave(b, 30.0);
    CHECK(std::abs(w1.speed - w2.speed) < 1e-6);
    CHECK(w1.speed > 0.0);
}

TEST_CASE("pulse") {
    const auto b = make_cubic(0.25);
    const auto V = pulse(b);
    CHECK(std::abs(V.value(0.0) - b.beta()) < 1e-8);
    CHECK(V.slope(0.0) == doctest::Approx(0.0));
    double drift = 0.0;
    for (std::size_t k = 0; k < V.v.size(); ++k) {
        drift = std::max(drift, std::abs(0.5 * V.dv[k] * V.dv[k] + b.F(V.v[k])));
    }
    CHECK(drift < 1e-8);
    CHECK(V.value(-3.0) == doctest::Approx(V.value(3.0)));
    // Tail decays at the linearized rate sqrt(-f'(0)) = 0.5.
    const double kappa = std::sqrt(-b.df(0.0)) * (1 - 1e-3);
    const double rate = -std::log(V.value(30.0) / V.value(20.0)) / 10.0;
    CHECK(rate >= kappa);
    CHECK(rate < 0.5 * (1 + 1e-3));
}

TEST_CASE("stable manifold profiles") {
    const auto b = make_cubic(0.25);
    const auto H = stable_manifold(b, 0.0);
    CHECK(H.slope(0.0) == doctest::Approx(std::sqrt(2 * b.F1())).epsilon(1e-12));
    CHECK(H.slope(0.0) == doctest::Approx(0.2886751).epsilon(1e-6));
    const auto U = stable_manifold(b, 0.25);
    CHECK(U.slope(0.0) == doctest::Approx(0.2964635).epsilon(1e-6));
    for (const auto* o : {&H, &U}) {
        double drift = 0.0;
        for (std::size_t k = 0; k < o->v.size(); ++k) {
            drift = std::max(drift, std::abs(0.5 * o->dv[k] * o->dv[k] + b.F(o->v[k]) - b.F1()));
            if (k > 0) CHECK(o->v[k] >= o->v[k - 1]);
        }
        CHECK(drift < 1e-8);
        CHECK(o->value(60.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(stable_manifold(b, 1.0), Error);
}

TEST_CASE("interval bump") {
    const auto b = make_cubic(0.25);
    const auto m = bump_min_radius(b);
    CHECK(m.peak > b.beta());
    try {
        interval_bump(b, 0.5 * m.radius);
        FAIL("expected RadiusTooSmall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RadiusTooSmall);
    }
    const double R = m.radius + 1.0;
    const auto p1 = interval_bump(b, R, 5.0);
    const auto p2 = interval_bump(b, 2 * R);
    const auto p4 = interval_bump(b, 4 * R);
    CHECK(p1.value(5.0) > b.beta());
    CHECK(p1.value(5.0 + R) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(p1.value(5.0 - R - 1.0) == 0.0);
    CHECK(p1.value(5.0) < p2.value(0.0));
    CHECK(p2.value(0.0) < p4.value(0.0));
    CHECK(p4.value(0.0) > 0.999);
    CHECK(p1.level == doctest::Approx(b.F(p1.value(5.0))));
}

TEST_CASE("orbit classification by first integral") {
    const auto b = make_cubic(0.25);
    CHECK(classify_orbit(b, b.beta(), 0.0) == OrbitKind::Pulse);
    CHECK(classify_orbit(b, 0.25, 0.0) == OrbitKind::Periodic);
    CHECK(classify_orbit(b, 1.0, 0.0) == OrbitKind::Manifold);
    CHECK(classify_orbit(b, 0.0, std::sqrt(2 * b.F1())) == OrbitKind::Manifold);
    CHECK(classify_orbit(b, 0.6, 0.0) == OrbitKind::BetweenManifolds);
    CHECK(classify_orbit(b, 0.0, 1.0) == OrbitKind::Unbounded);
}
