#pragma once

// Bistable nonlinearity f with f(0)=f(a)=f(1)=0 and F(1)=∫₀¹f > 0, plus the
// scalar constants derived from it. All derived values are computed once at
// construction; a Bistable is immutable afterwards.

#include <functional>
#include <string>
#include <vector>

namespace frontlab {

class Bistable {
public:
    using Fn = std::function<double(double)>;

    /// Generic evaluator. `F` may be empty, in which case the primitive is
    /// computed by quadrature. The invariants are checked numerically and
    /// violations throw InvalidNonlinearity / UnbalancedNonlinearity.
    Bistable(std::string name, Fn f, Fn df, Fn F = {});

    double f(double s) const { return f_(s); }
    double df(double s) const { return df_(s); }
    double F(double s) const { return F_(s); }

    const std::string& name() const { return name_; }
    double a() const { return a_; }
    double beta() const { return beta_; }
    double delta0() const { return delta0_; }
    double sigma0() const { return sigma0_; }
    double f_max() const { return f_max_; }
    double argmax_f() const { return argmax_f_; }
    /// max |f'| over [0,1]; sets the explicit-reaction time step.
    double fprime_abs_max() const { return fprime_abs_max_; }
    /// max f' over [0,1] (positive, attained near a).
    double fprime_max() const { return fprime_max_; }
    double F1() const { return F1_; }
    double Fa() const { return Fa_; }

    /// The same nonlinearity multiplied by k > 0 (a and β are unchanged).
    Bistable scaled(double k) const;

private:
    void derive_constants();

    std::string name_;
    Fn f_, df_, F_;
    double a_ = 0, beta_ = 0, delta0_ = 0, sigma0_ = 0;
    double f_max_ = 0, argmax_f_ = 0, fprime_abs_max_ = 0, fprime_max_ = 0;
    double F1_ = 0, Fa_ = 0;
};

/// f(s) = s(1-s)(s-a) for 0 < a < 1/2.
Bistable make_cubic(double a);

/// f sampled at n >= 8 equally spaced nodes covering [0,1] (first and last
/// nodes at 0 and 1), interpolated by a cubic B-spline.
Bistable make_table(const std::vector<double>& values);

struct Delta0Sigma0 {
    double delta0;
    double sigma0;
};
Delta0Sigma0 delta0_sigma0(const Bistable& b);

struct ReservoirConstants {
    double delta;
    double mu_star;
    double sigma;
};

/// min over s in [0,1] of (mu/2)(s-delta)^2 - F(s).
double reservoir_sigma(const Bistable& b, double delta, double mu);

/// Smallest mu on the grid 1e-3 * 2^(k/16), not below `mu_floor`, for which
/// the minimum above is positive. Throws OutOfRange unless 0 < delta < a.
ReservoirConstants reservoir_constants(const Bistable& b, double delta, double mu_floor = 0.0);

/// Maximizer of a unimodal function on [lo, hi] by golden-section search.
double golden_section_max(const std::function<double(double)>& g, double lo, double hi, double tol = 1e-12);

}  // namespace frontlab
