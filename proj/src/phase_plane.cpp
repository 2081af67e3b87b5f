#include "frontlab/phase_plane.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

struct State {
    double y;
    double p;
};

using Rhs = std::function<double(double y, double p)>;  // returns y''

State rk4(const Rhs& acc, State s, double h) {
    const double k1y = s.p, k1p = acc(s.y, s.p);
    const double k2y = s.p + 0.5 * h * k1p, k2p = acc(s.y + 0.5 * h * k1y, k2y);
    const double k3y = s.p + 0.5 * h * k2p, k3p = acc(s.y + 0.5 * h * k2y, k3y);
    const double k4y = s.p + h * k3p, k4p = acc(s.y + h * k3y, k4y);
    return {s.y + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y), s.p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)};
}

// Cubic Hermite interpolation on a uniform table.
double hermite(const std::vector<double>& y, const std::vector<double>& dy, double h, double t, bool derivative) {
    const auto n = y.size();
    double k = std::floor(t / h);
    k = std::clamp(k, 0.0, static_cast<double>(n - 2));
    const auto i = static_cast<std::size_t>(k);
    const double s = t / h - k;
    const double y0 = y[i], y1 = y[i + 1], m0 = dy[i] * h, m1 = dy[i + 1] * h;
    if (derivative) {
        const double d = (6 * s * s - 6 * s) * y0 + (3 * s * s - 4 * s + 1) * m0 + (-6 * s * s + 6 * s) * y1 +
                         (3 * s * s - 2 * s) * m1;
        return d / h;
    }
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
}

enum class Shot { Overshoot, Undershoot, Undecided };

struct ShotResult {
    Shot outcome;
    double slope_at_a = 0.0;  // φ' where φ crosses a
    double z_at_a = 0.0;
};

// Shoot from the unstable manifold of (1,0) with speed c.
constexpr double kShotGap = 1e-8;

ShotResult shoot_wave(const Bistable& b, double c, double h, double zlimit, std::vector<State>* record = nullptr) {
    const double lam = 0.5 * (-c + std::sqrt(c * c - 4.0 * b.df(1.0)));
    State s{1.0 - kShotGap, -lam * kShotGap};
    if (record) record->push_back(s);
    Rhs acc = [&](double y, double p) { return -c * p - b.f(y); };
    ShotResult result{Shot::Undecided};
    bool crossed = false;
    for (double z = 0.0; z < zlimit; z += h) {
        const State next = rk4(acc, s, h);
        if (!crossed && next.y <= b.a() && s.y > b.a()) {
            const double t = (s.y - b.a()) / (s.y - next.y);
            result.slope_at_a = s.p + t * (next.p - s.p);
            result.z_at_a = z + t * h;
            crossed = true;
        }
        s = next;
        if (record) record->push_back(s);
        if (s.y < 0.0) {
            result.outcome = Shot::Overshoot;
            return result;
        }
        // The first integral ½φ'² + F(φ) decays along the orbit, so once it
        // is negative the orbit can no longer reach 0.
        if (s.p >= 0.0 || 0.5 * s.p * s.p + b.F(s.y) < 0.0) {
            result.outcome = Shot::Undershoot;
            return result;
        }
    }
    return result;
}

}  // namespace

std::string_view to_string(OrbitKind kind) noexcept {
    switch (kind) {
        case OrbitKind::Pulse: return "pulse";
        case OrbitKind::Manifold: return "manifold";
        case OrbitKind::IntervalBump: return "interval_bump";
        case OrbitKind::BetweenManifolds: return "between_manifolds";
        case OrbitKind::Periodic: return "periodic";
        case OrbitKind::Unbounded: return "unbounded";
    }
    return "unknown";
}

double WaveProfile::value(double z) const {
    if (z <= z_min()) return 1.0;
    if (z >= z_max()) return 0.0;
    return hermite(phi, dphi, h, z - z0, false);
}

double WaveProfile::slope(double z) const {
    if (z <= z_min() || z >= z_max()) return 0.0;
    return hermite(phi, dphi, h, z - z0, true);
}

WaveProfile traveling_wave(const Bistable& b, double zmax, double h) {
    constexpr double zlimit = 400.0;
    double lo = 0.0;
    double hi = 1.0;
    if (shoot_wave(b, lo, h, zlimit).outcome != Shot::Overshoot) {
        throw Error(ErrorCode::NoConvergence, "zero speed does not overshoot");
    }
    int guard = 0;
    while (shoot_wave(b, hi, h, zlimit).outcome != Shot::Undershoot) {
        hi *= 2.0;
        if (++guard > 20) throw Error(ErrorCode::NoConvergence, "no undershooting speed found");
    }
    double slope = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        const ShotResult r = shoot_wave(b, mid, h, zlimit);
        if (r.outcome == Shot::Undecided) break;
        (r.outcome == Shot::Overshoot ? lo : hi) = mid;
        slope = r.slope_at_a;
    }
    const double c = 0.5 * (lo + hi);
    // The shot itself runs along the unstable manifold of (1,0), which is the
    // accurate direction for the part of the profile above a.
    std::vector<State> shot;
    const ShotResult final_shot = shoot_wave(b, c, h, zlimit, &shot);
    slope = final_shot.slope_at_a;
    std::vector<double> shot_y(shot.size()), shot_p(shot.size());
    for (std::size_t k = 0; k < shot.size(); ++k) {
        shot_y[k] = shot[k].y;
        shot_p[k] = shot[k].p;
    }

    WaveProfile w;
    w.speed = c;
    w.h = h;
    const auto half = static_cast<std::size_t>(std::llround(zmax / h));
    w.z0 = -static_cast<double>(half) * h;
    w.phi.assign(2 * half + 1, 0.0);
    w.dphi.assign(2 * half + 1, 0.0);
    Rhs acc = [&](double y, double p) { return -c * p - b.f(y); };

    const double lam_plus = 0.5 * (-c + std::sqrt(c * c - 4.0 * b.df(1.0)));
    for (std::size_t k = 0; k < half; ++k) {
        const double z = w.z0 + h * static_cast<double>(k);
        const double t = z + final_shot.z_at_a;  // position along the shot
        if (t < 0.0) {
            const double gap = kShotGap * std::exp(lam_plus * t);
            w.phi[k] = 1.0 - gap;
            w.dphi[k] = -lam_plus * gap;
        } else {
            w.phi[k] = hermite(shot_y, shot_p, h, t, false);
            w.dphi[k] = hermite(shot_y, shot_p, h, t, true);
        }
    }
    w.phi[half] = b.a();
    w.dphi[half] = slope;
    State s{b.a(), slope};
    bool tail = false;
    double z_switch = 0.0, y_switch = 0.0;
    const double lam_minus = 0.5 * (-c - std::sqrt(c * c - 4.0 * b.df(0.0)));
    for (std::size_t k = half + 1; k < w.phi.size(); ++k) {
        const double z = w.z0 + h * static_cast<double>(k);
        if (!tail) {
            const State next = rk4(acc, s, h);
            if (next.y < 1e-6 || next.p >= 0.0) {
                tail = true;
                z_switch = z - h;
                y_switch = s.y;
            } else {
                s = next;
            }
        }
        if (tail) {
            w.phi[k] = y_switch * std::exp(lam_minus * (z - z_switch));
            w.dphi[k] = lam_minus * w.phi[k];
        } else {
            w.phi[k] = s.y;
            w.dphi[k] = s.p;
        }
    }
    return w;
}

// ---------------------------------------------------------------------------
// Stationary orbits

double Orbit1D::value(double x) const {
    double y = x - center;
    if (even) y = std::abs(y);
    if (support >= 0.0 && std::abs(y) > support) return 0.0;
    if (y < 0.0) return v.front() + dv.front() * y;
    if (y > x_max()) {
        if (support >= 0.0) return 0.0;
        return tail_target + (v.back() - tail_target) * std::exp(-tail_rate * (y - x_max()));
    }
    const double out = hermite(v, dv, h, y, false);
    return support >= 0.0 ? std::max(out, 0.0) : out;
}

double Orbit1D::slope(double x) const {
    double y = x - center;
    double sign = 1.0;
    if (even && y < 0.0) {
        y = -y;
        sign = -1.0;
    }
    if (support >= 0.0 && y > support) return 0.0;
    if (y < 0.0) return dv.front();
    if (y > x_max()) {
        if (support >= 0.0) return 0.0;
        return -tail_rate * (v.back() - tail_target) * std::exp(-tail_rate * (y - x_max())) * sign;
    }
    return sign * hermite(v, dv, h, y, true);
}

namespace {

// Integrate v'' = -f(v) from (v0, p0) on a table of n+1 nodes, switching to
// the exponential tail towards `target` once within `switch_gap` of it or
// once the orbit turns back.
void fill_with_tail(const Bistable& b, Orbit1D& o, double v0, double p0, std::size_t n, double switch_gap) {
    Rhs acc = [&](double y, double) { return -b.f(y); };
    o.v.assign(n + 1, 0.0);
    o.dv.assign(n + 1, 0.0);
    o.v[0] = v0;
    o.dv[0] = p0;
    State s{v0, p0};
    const double dir = o.tail_target > v0 ? 1.0 : -1.0;
    bool tail = false;
    double x_switch = 0.0, gap_switch = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = o.h * static_cast<double>(k);
        if (!tail) {
            const State next = rk4(acc, s, o.h);
            const double gap = std::abs(o.tail_target - next.y);
            const bool turned = dir * next.p <= 0.0 && k > 1;
            if (gap < switch_gap || turned || dir * (next.y - o.tail_target) > 0.0) {
                tail = true;
                x_switch = x - o.h;
                gap_switch = s.y - o.tail_target;
            } else {
                s = next;
            }
        }
        if (tail) {
            const double e = gap_switch * std::exp(-o.tail_rate * (x - x_switch));
            o.v[k] = o.tail_target + e;
            o.dv[k] = -o.tail_rate * e;
        } else {
            o.v[k] = s.y;
            o.dv[k] = s.p;
        }
    }
}

}  // namespace

Orbit1D pulse(const Bistable& b, double xmax, double h) {
    Orbit1D o;
    o.kind = OrbitKind::Pulse;
    o.h = h;
    o.even = true;
    o.tail_target = 0.0;
    o.tail_rate = std::sqrt(-b.df(0.0));
    o.level = b.F(b.beta());
    const auto n = static_cast<std::size_t>(std::llround(xmax / h));
    fill_with_tail(b, o, b.beta(), 0.0, n, 1e-5);
    return o;
}

Orbit1D stable_manifold(const Bistable& b, double start_value, double xmax, double h) {
    if (!(start_value >= 0.0) || !(start_value < 1.0)) {
        throw Error(ErrorCode::OutOfRange, "start value must lie in [0,1)");
    }
    Orbit1D o;
    o.kind = OrbitKind::Manifold;
    o.h = h;
    o.tail_target = 1.0;
    o.tail_rate = std::sqrt(-b.df(1.0));
    o.level = b.F1();
    const double p0 = std::sqrt(2.0 * (b.F1() - b.F(start_value)));
    const auto n = static_cast<std::size_t>(std::llround(xmax / h));
    fill_with_tail(b, o, start_value, p0, n, 1e-5);
    return o;
}

double bump_half_width(const Bistable& b, double p, double h) {
    Rhs acc = [&](double y, double) { return -b.f(y); };
    State s{p, 0.0};
    constexpr double xlimit = 500.0;
    for (double x = 0.0; x < xlimit; x += h) {
        const State next = rk4(acc, s, h);
        if (next.y <= 0.0) {
            // One Newton step from the last positive node.
            return x + s.y / -s.p;
        }
        if (next.p >= 0.0 && x > 0.0) return std::numeric_limits<double>::infinity();
        s = next;
    }
    return std::numeric_limits<double>::infinity();
}

BumpMinimum bump_min_radius(const Bistable& b, double h) {
    const double lo = b.beta() + 1e-6;
    const double hi = 1.0 - 1e-9;
    const double p = golden_section_max([&](double q) { return -bump_half_width(b, q, h); }, lo, hi, 1e-8);
    return {bump_half_width(b, p, h), p};
}

Orbit1D interval_bump(const Bistable& b, double radius, double offset, double h) {
    const BumpMinimum m = bump_min_radius(b, h);
    if (radius < m.radius) {
        std::ostringstream msg;
        msg.precision(10);
        msg << "R = " << radius << " is below the minimal radius " << m.radius << " (attained at Psi(0) = "
            << m.peak << ")";
        throw Error(ErrorCode::RadiusTooSmall, msg.str());
    }
    double lo = m.peak;
    double hi = 1.0 - 1e-15;
    if (bump_half_width(b, hi, h) < radius) {
        throw Error(ErrorCode::NoConvergence, "radius too large for the shooting range");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bump_half_width(b, mid, h) < radius ? lo : hi) = mid;
    }
    const double peak = 0.5 * (lo + hi);

    Orbit1D o;
    o.kind = OrbitKind::IntervalBump;
    const auto n = static_cast<std::size_t>(std::ceil(radius / h));
    o.h = radius / static_cast<double>(n);
    o.even = true;
    o.center = offset;
    o.support = radius;
    o.level = b.F(peak);
    o.v.assign(n + 1, 0.0);
    o.dv.assign(n + 1, 0.0);
    Rhs acc = [&](double y, double) { return -b.f(y); };
    State s{peak, 0.0};
    o.v[0] = peak;
    for (std::size_t k = 1; k <= n; ++k) {
        s = rk4(acc, s, o.h);
        o.v[k] = s.y;
        o.dv[k] = s.p;
    }
    o.v[n] = 0.0;
    return o;
}

OrbitKind classify_orbit(const Bistable& b, double v, double vprime, double tol) {
    const double E = 0.5 * vprime * vprime + b.F(v);
    if (std::abs(E - b.F1()) <= tol) return OrbitKind::Manifold;
    if (std::abs(E) <= tol && v >= 0.0 && v <= b.beta() + tol) return OrbitKind::Pulse;
    if (E < 0.0 && v > 0.0 && v < b.beta()) return OrbitKind::Periodic;
    if (E > 0.0 && E < b.F1() && v < 1.0) return OrbitKind::BetweenManifolds;
    return OrbitKind::Unbounded;
}

}  // namespace frontlab
