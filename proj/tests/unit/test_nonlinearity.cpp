#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "frontlab/errors.hpp"
#include "frontlab/nonlinearity.hpp"

using namespace frontlab;

namespace {

// Independent oracle: beta is the root in (a,1) of s^2/4 - (1+a)s/3 + a/2.
double beta_oracle(double a) {
    const double A = 0.25, B = -(1.0 + a) / 3.0, C = a / 2.0;
    const double disc = std::sqrt(B * B - 4 * A * C);
    const double r1 = (-B - disc) / (2 * A);
    const double r2 = (-B + disc) / (2 * A);
    return (r1 > a && r1 < 1.0) ? r1 : r2;
}

}  // namespace

TEST_CASE("cubic primitive values") {
    const auto b = make_cubic(0.25);
    CHECK(b.F1() == doctest::Approx((1 - 2 * 0.25) / 12).epsilon(1e-12));
    CHECK(b.Fa() == doctest::Approx(std::pow(0.25, 3) * (0.25 - 2) / 12).epsilon(1e-12));
    CHECK(b.F1() == doctest::Approx(0.0416667).epsilon(1e-5));
    CHECK(b.Fa() == doctest::Approx(-0.00227865).epsilon(1e-5));
    CHECK(b.a() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("construction errors") {
    auto code = [](double a) {
        try {
            make_cubic(a);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidDocument;
    };
    CHECK(code(0.5) == ErrorCode::UnbalancedNonlinearity);
    CHECK(code(0.0) == ErrorCode::OutOfRange);
    CHECK(code(-0.1) == ErrorCode::OutOfRange);
}

TEST_CASE("F matches quadrature of f at random points") {
    const auto b = make_cubic(0.25);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto f = [&](double s) { return b.f(s); };
    for (int k = 0; k < 100; ++k) {
        const double s = u(rng);
        const double q = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, s);
        CHECK(std::abs(q - b.F(s)) < 1e-10);
    }
}

TEST_CASE("sign pattern and extrema of F") {
    const auto b = make_cubic(0.25);
    double Fmin = 1e9, Fmax = -1e9;
    for (int k = 1; k < 10000; ++k) {
        const double s = k / 10000.0;
        if (s < b.a() - 1e-9) CHECK(b.f(s) < 0.0);
        if (s > b.a() + 1e-9) CHECK(b.f(s) > 0.0);
        Fmin = std::min(Fmin, b.F(s));
        Fmax = std::max(Fmax, b.F(s));
    }
    CHECK(Fmin >= b.Fa() - 1e-15);
    CHECK(Fmax <= b.F1() + 1e-15);
}

TEST_CASE("threshold beta") {
    const auto b = make_cubic(0.25);
    CHECK(std::abs(b.beta() - beta_oracle(0.25)) < 1e-9);
    CHECK(std::abs(b.beta() - 0.3923747) < 1e-7);
    CHECK(std::abs(b.F(b.beta())) < 1e-12);
    CHECK(b.F(b.beta() - 1e-6) < 0.0);
    CHECK(b.F(b.beta() + 1e-6) > 0.0);

    const double b05 = make_cubic(0.05).beta();
    const double b01 = make_cubic(0.01).beta();
    CHECK(b05 == doctest::Approx(beta_oracle(0.05)).epsilon(1e-9));
    CHECK(b01 == doctest::Approx(beta_oracle(0.01)).epsilon(1e-9));
    CHECK(b01 < b05);
    CHECK(b05 < b.beta());
}

TEST_CASE("f_max by golden section") {
    const auto b = make_cubic(0.25);
    // Oracle: the critical point of the cubic, root of f'(s) = 0 in (a,1).
    const double a = 0.25;
    const double s_star = (2 * (1 + a) + std::sqrt(4 * (1 + a) * (1 + a) - 12 * a)) / 6;
    CHECK(b.argmax_f() == doctest::Approx(s_star).epsilon(1e-6));
    CHECK(b.f_max() == doctest::Approx(s_star * (1 - s_star) * (s_star - a)).epsilon(1e-12));
    CHECK(b.f_max() == doctest::Approx(0.0947595).epsilon(1e-6));
}

TEST_CASE("delta0 and sigma0") {
    const auto b = make_cubic(0.25);
    const auto [d0, s0] = delta0_sigma0(b);
    CHECK(s0 == doctest::Approx(0.125));
    CHECK(b.df(d0) <= -s0 + 1e-12);
    CHECK(b.df(1 - d0) <= -s0 + 1e-12);
    // Closed form for the cubic: the smaller root of 3s^2 - 2.5s + 0.125.
    CHECK(d0 == doctest::Approx((2.5 - std::sqrt(6.25 - 1.5)) / 6).epsilon(1e-8));

    const auto half = b.scaled(0.5);
    CHECK(half.sigma0() == doctest::Approx(s0 / 2));
    CHECK(half.a() == doctest::Approx(b.a()));
    CHECK(half.beta() == doctest::Approx(b.beta()));
}

TEST_CASE("reservoir constants") {
    const auto b = make_cubic(0.25);
    const auto rc = reservoir_constants(b, 0.1);
    CHECK(rc.mu_star >= 2 * b.F1() / (0.9 * 0.9));
    CHECK(rc.mu_star >= 0.102881);
    CHECK(rc.sigma > 0.0);
    for (int k = 0; k <= 10000; ++k) {
        const double s = k / 10000.0;
        CHECK(0.5 * rc.mu_star * (s - 0.1) * (s - 0.1) - b.F(s) >= rc.sigma - 1e-15);
    }
    CHECK_THROWS_AS(reservoir_constants(b, 0.0), Error);
    CHECK_THROWS_AS(reservoir_constants(b, 0.3), Error);
}

TEST_CASE("tabulated nonlinearity reproduces the cubic") {
    std::vector<double> v(401);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double s = static_cast<double>(k) / 400.0;
        v[k] = s * (1 - s) * (s - 0.3);
    }
    const auto t = make_table(v);
    const auto c = make_cubic(0.3);
    CHECK(t.a() == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(t.F1() == doctest::Approx(c.F1()).epsilon(1e-6));
    CHECK(t.beta() == doctest::Approx(c.beta()).epsilon(1e-5));
}
