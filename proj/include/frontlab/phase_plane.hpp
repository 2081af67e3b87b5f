#pragma once

// One-dimensional ODE objects: the traveling wave φ'' + cφ' + f(φ) = 0 and
// the stationary orbits of v'' + f(v) = 0 in the (v, v') phase plane.
// All are integrated with classical RK4 at a fixed step.

#include <string_view>
#include <vector>

#include "frontlab/nonlinearity.hpp"

namespace frontlab {

/// Tabulated traveling wave, normalized so φ(0) = a. Evaluation outside the
/// table is clamped to 1 (left) and 0 (right).
struct WaveProfile {
    double speed = 0.0;
    double z0 = 0.0;  // first table node
    double h = 0.0;   // table spacing
    std::vector<double> phi;
    std::vector<double> dphi;

    double value(double z) const;
    double slope(double z) const;
    double z_min() const { return z0; }
    double z_max() const { return z0 + h * static_cast<double>(phi.size() - 1); }
};

WaveProfile traveling_wave(const Bistable& b, double zmax = 60.0, double h = 1e-3);

enum class OrbitKind { Pulse, Manifold, IntervalBump, BetweenManifolds, Periodic, Unbounded };

std::string_view to_string(OrbitKind kind) noexcept;

/// Orbit sampled on x = 0, h, 2h, ... with an exponential tail past the
/// table (towards `tail_target`) or, for compact support, zero outside
/// `support`. Even orbits are evaluated at |x - center|.
struct Orbit1D {
    OrbitKind kind = OrbitKind::Unbounded;
    double h = 0.0;
    std::vector<double> v;
    std::vector<double> dv;
    double level = 0.0;  // ½v'² + F(v)
    bool even = false;
    double center = 0.0;
    double support = -1.0;  // half-width of the support, or < 0 if unbounded
    double tail_target = 0.0;
    double tail_rate = 0.0;

    double value(double x) const;
    double slope(double x) const;
    double x_max() const { return h * static_cast<double>(v.size() - 1); }
};

/// Symmetric pulse V with V(0) = β, V'(0) = 0, V → 0 at infinity.
Orbit1D pulse(const Bistable& b, double xmax = 40.0, double h = 1e-3);

/// Increasing profile on the stable manifold of (1,0) starting from
/// `start_value`: H for start 0, U for start a.
Orbit1D stable_manifold(const Bistable& b, double start_value, double xmax = 40.0, double h = 1e-3);

/// Distance from the midpoint to the first zero of the orbit through
/// (p, 0), p in (β, 1).
double bump_half_width(const Bistable& b, double p, double h = 1e-3);

/// Smallest half-width R for which the interval bump exists, and the
/// midpoint value at which it is attained.
struct BumpMinimum {
    double radius;
    double peak;
};
BumpMinimum bump_min_radius(const Bistable& b, double h = 1e-3);

/// Ψ'' + f(Ψ) = 0 on (offset - R, offset + R), Ψ = 0 at the ends, taken on
/// the branch whose peak tends to 1 as R grows. Throws RadiusTooSmall.
Orbit1D interval_bump(const Bistable& b, double radius, double offset = 0.0, double h = 1e-3);

OrbitKind classify_orbit(const Bistable& b, double v, double vprime, double tol = 1e-10);

}  // namespace frontlab
