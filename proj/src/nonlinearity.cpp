#include "frontlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/cubic_hermite.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

constexpr int kScan = 4000;

double bisect_root(const std::function<double(double)>& g, double lo, double hi) {
    auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-15; };
    auto [l, r] = boost::math::tools::bisect(g, lo, hi, tol);
    return 0.5 * (l + r);
}

// Primitive of f tabulated on a fine grid, interpolated by cubic Hermite
// polynomials whose slopes are the exact values of f.
Bistable::Fn tabulated_primitive(const Bistable::Fn& f) {
    constexpr int n = 2048;
    std::vector<double> x(n + 1), y(n + 1), dy(n + 1);
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        x[k] = static_cast<double>(k) / n;
        if (k > 0) acc += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, x[k - 1], x[k]);
        y[k] = acc;
        dy[k] = f(x[k]);
    }
    auto spline = std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
        std::move(x), std::move(y), std::move(dy));
    const double F0 = 0.0;
    const double F1 = (*spline)(1.0);
    const double f0 = f(0.0);
    const double f1 = f(1.0);
    return [spline, F0, F1, f0, f1](double s) {
        if (s < 0.0) return F0 + f0 * s;
        if (s > 1.0) return F1 + f1 * (s - 1.0);
        return (*spline)(s);
    };
}

}  // namespace

double golden_section_max(const std::function<double(double)>& g, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double g1 = g(x1);
    double g2 = g(x2);
    while (hi - lo > tol) {
        if (g1 < g2) {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        }
    }
    return 0.5 * (lo + hi);
}

Bistable::Bistable(std::string name, Fn f, Fn df, Fn F)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), F_(std::move(F)) {
    if (!f_ || !df_) throw Error(ErrorCode::InvalidNonlinearity, "f and f' evaluators are required");
    if (!F_) F_ = tabulated_primitive(f_);
    derive_constants();
}

void Bistable::derive_constants() {
    constexpr double zero_tol = 1e-10;
    if (std::abs(f_(0.0)) > zero_tol || std::abs(f_(1.0)) > zero_tol) {
        throw Error(ErrorCode::InvalidNonlinearity, "f(0) and f(1) must vanish");
    }
    if (!(df_(0.0) < 0.0) || !(df_(1.0) < 0.0)) {
        throw Error(ErrorCode::InvalidNonlinearity, "f'(0) and f'(1) must be negative");
    }

    // The interior zero a: f changes sign from - to + exactly once.
    int changes = 0;
    double a_lo = 0.0;
    double a_hi = 0.0;
    double prev = f_(1.0 / kScan);
    for (int k = 2; k < kScan; ++k) {
        const double s = static_cast<double>(k) / kScan;
        const double cur = f_(s);
        if ((prev < 0.0) != (cur < 0.0)) {
            ++changes;
            a_lo = s - 1.0 / kScan;
            a_hi = s;
        }
        prev = cur;
    }
    if (changes != 1 || !(f_(a_lo) < 0.0)) {
        throw Error(ErrorCode::InvalidNonlinearity, "f must be negative on (0,a) and positive on (a,1)");
    }
    a_ = bisect_root(f_, a_lo, a_hi);
    if (!(df_(a_) > 0.0)) throw Error(ErrorCode::InvalidNonlinearity, "f'(a) must be positive");

    F1_ = F_(1.0);
    Fa_ = F_(a_);
    if (!(F1_ > 0.0)) {
        throw Error(ErrorCode::UnbalancedNonlinearity, "F(1) = " + std::to_string(F1_) + " is not positive");
    }
    beta_ = bisect_root(F_, a_, 1.0);

    argmax_f_ = golden_section_max(f_, a_, 1.0);
    f_max_ = f_(argmax_f_);

    fprime_abs_max_ = 0.0;
    fprime_max_ = 0.0;
    for (int k = 0; k <= kScan; ++k) {
        const double d = df_(static_cast<double>(k) / kScan);
        fprime_abs_max_ = std::max(fprime_abs_max_, std::abs(d));
        fprime_max_ = std::max(fprime_max_, d);
    }

    sigma0_ = 0.5 * std::min(-df_(0.0), -df_(1.0));
    // Largest delta0 <= 0.45 with f' <= -sigma0 on [0,delta0] and [1-delta0,1].
    auto ok = [&](double d) { return df_(d) <= -sigma0_ && df_(1.0 - d) <= -sigma0_; };
    constexpr double step = 1e-4;
    double good = 0.0;
    while (good + step <= 0.45 && ok(good + step)) good += step;
    double bad = std::min(good + step, 0.45);
    if (bad > good && !ok(bad)) {
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (good + bad);
            (ok(mid) ? good : bad) = mid;
        }
    } else {
        good = bad;
    }
    delta0_ = good;
}

Bistable Bistable::scaled(double k) const {
    if (!(k > 0.0)) throw Error(ErrorCode::OutOfRange, "scale factor must be positive");
    auto f = f_;
    auto df = df_;
    auto F = F_;
    return Bistable(name_ + "*" + std::to_string(k), [f, k](double s) { return k * f(s); },
                    [df, k](double s) { return k * df(s); }, [F, k](double s) { return k * F(s); });
}

Bistable make_cubic(double a) {
    if (!(a > 0.0)) throw Error(ErrorCode::OutOfRange, "a = " + std::to_string(a) + " must be positive");
    if (!(a < 0.5)) {
        throw Error(ErrorCode::UnbalancedNonlinearity, "a = " + std::to_string(a) + " gives F(1) <= 0");
    }
    return Bistable(
        "cubic(a=" + std::to_string(a) + ")", [a](double s) { return s * (1.0 - s) * (s - a); },
        [a](double s) { return -3.0 * s * s + 2.0 * (1.0 + a) * s - a; },
        [a](double s) { return s * s * (-a / 2.0 + (1.0 + a) * s / 3.0 - s * s / 4.0); });
}

Bistable make_table(const std::vector<double>& values) {
    if (values.size() < 8) throw Error(ErrorCode::InvalidNonlinearity, "table needs at least 8 samples");
    const double step = 1.0 / static_cast<double>(values.size() - 1);
    auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
        values.begin(), values.end(), 0.0, step);
    const double f0 = (*spline)(0.0), f1 = (*spline)(1.0);
    const double d0 = spline->prime(0.0), d1 = spline->prime(1.0);
    auto f = [spline, f0, f1, d0, d1](double s) {
        if (s < 0.0) return f0 + d0 * s;
        if (s > 1.0) return f1 + d1 * (s - 1.0);
        return (*spline)(s);
    };
    auto df = [spline, d0, d1](double s) {
        if (s <= 0.0) return d0;
        if (s >= 1.0) return d1;
        return spline->prime(s);
    };
    return Bistable("table(" + std::to_string(values.size()) + ")", f, df);
}

Delta0Sigma0 delta0_sigma0(const Bistable& b) { return {b.delta0(), b.sigma0()}; }

double reservoir_sigma(const Bistable& b, double delta, double mu) {
    auto g = [&](double s) { return 0.5 * mu * (s - delta) * (s - delta) - b.F(s); };
    constexpr int n = 10000;
    double best = g(0.0);
    int best_k = 0;
    for (int k = 1; k <= n; ++k) {
        const double v = g(static_cast<double>(k) / n);
        if (v < best) {
            best = v;
            best_k = k;
        }
    }
    const double lo = std::max(0.0, (best_k - 1.0) / n);
    const double hi = std::min(1.0, (best_k + 1.0) / n);
    const double s = golden_section_max([&](double x) { return -g(x); }, lo, hi);
    return std::min(best, g(s));
}

ReservoirConstants reservoir_constants(const Bistable& b, double delta, double mu_floor) {
    if (!(delta > 0.0) || !(delta < b.a())) {
        throw Error(ErrorCode::OutOfRange, "delta must lie in (0, a)");
    }
    for (int k = 0; k < 16 * 40; ++k) {
        const double mu = 1e-3 * std::pow(2.0, k / 16.0);
        if (mu < mu_floor) continue;
        const double sigma = reservoir_sigma(b, delta, mu);
        if (sigma > 0.0) return {delta, mu, sigma};
    }
    throw Error(ErrorCode::NoConvergence, "no admissible mu on the grid");
}

}  // namespace frontlab
