#pragma once

#include "oscispline/calculus.hpp"

#include <span>
#include <vector>

namespace oscispline {

/// Perfect g-spline of order r: G^(r) = sigma * g with sigma = eps * (-1)^i on
/// (t_i, t_{i+1}), t_0 = 0, anchored at the right end b of the calculus domain:
/// G^(j)(b) = 0 for 1 <= j < r and G(b) = limit_value (0 on a segment).
///
/// With m = r - j - 1 and Q_k from the calculus,
///
///     G^(j)(t) = L [j = 0] + (-1)^(r-j) [ sigma(t) Q_{m+1}(t)
///                + sum_{t_k > t} 2 eps (-1)^k F_m(t_k; t) ],
///     F_m(a; t) = sum_{i=0..m} (a - t)^(m-i) / (m-i)! Q_{i+1}(a).
class PerfectGSpline {
public:
    int order() const { return r_; }
    const std::vector<double>& knots() const { return knots_; }
    int knot_count() const { return static_cast<int>(knots_.size()); }
    int leading_sign() const { return eps_; }
    const Domain& domain() const { return calc_.g().domain(); }
    double limit_value() const { return limit_; }
    const GCalculus& calculus() const { return calc_; }

    /// G^(j)(t) for 0 <= j <= r. At a knot G^(r) takes its right limit.
    /// On the half-line t = inf is allowed and returns the limit values.
    double eval(int j, double t) const;
    /// G(t), G'(t), ..., G^(r-1)(t) into out (size r).
    void eval_all(double t, std::span<double> out) const;
    /// Sign of G^(r)/g at t (right limit at knots).
    int sign_at(double t) const;
    /// d G^(j)(t) / d t_k (k is 0-based).
    double knot_derivative(int j, int k, double t) const;

    PerfectGSpline negated() const;
    PerfectGSpline with_limit(double limit) const;

private:
    friend PerfectGSpline make_spline(const GCalculus&, std::vector<double>, int, double);

    int r_ = 1;
    std::vector<double> knots_;
    int eps_ = 1;
    double limit_ = 0.0;
    GCalculus calc_;
    // Q_0 ... Q_r at each knot, row-major
    std::vector<double> knot_q_;
};

/// Spline anchored at the calculus anchor. Knot pairs closer than 1e-12 are
/// removed. Throws KnotsNotSorted / KnotsOutOfRange, InvalidArgument for eps.
PerfectGSpline make_spline(const GCalculus& calc, std::vector<double> knots, int leading_sign,
                           double limit_value = 0.0);

/// Segment spline with G^(j)(A) = 0, j < r; calc must live on [0, A].
PerfectGSpline make_segment_spline(int r, double A, std::vector<double> knots, int leading_sign,
                                   const GCalculus& calc);

/// Half-line spline equal to limit_value + sigma P_r on its last interval.
PerfectGSpline make_halfline_spline(int r, std::vector<double> knots, int leading_sign, double limit_value,
                                    const GCalculus& calc);

struct SplineZero {
    double t = 0.0;
    /// false for a zero without a sign change (even multiplicity, found on a sample).
    bool sign_change = true;
};

/// Zeros of G^(j) strictly inside (a, b), located by bisection between the
/// samples of a grid clustered near the knots. Values below 1e-14 of the
/// sampled maximum count as zero.
std::vector<SplineZero> sign_changes_and_zeros(const PerfectGSpline& spline, int j, double a, double b,
                                               int samples = 4096);

}  // namespace oscispline
