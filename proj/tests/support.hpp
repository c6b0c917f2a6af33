#pragma once

// Independent numerics for tests: adaptive Simpson with Richardson correction
// and a direct integral representation of perfect splines. Shares nothing
// with the library's quadrature.

#include "oscispline/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

using Fn = std::function<double(double)>;

inline double simpson_rec(const Fn& f, double a, double b, double fa, double fm, double fb, double whole,
                          double tol, int depth)
{
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
        return left + right + diff / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const Fn& f, double a, double b, double tol = 1e-13)
{
    if (b <= a)
        return 0.0;
    // split into a few panels so smooth peaks are not missed
    const int panels = 16;
    double h = (b - a) / panels, sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        double lo = a + i * h, hi = (i + 1 == panels) ? b : lo + h;
        double fa = f(lo), fb = f(hi), fm = f(0.5 * (lo + hi));
        double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        sum += simpson_rec(f, lo, hi, fa, fm, fb, whole, tol / panels, 40);
    }
    return sum;
}

/// Integral over [a, b] split at the given breakpoints.
inline double integrate_pieces(const Fn& f, double a, double b, std::vector<double> breaks, double tol = 1e-13)
{
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double lo = std::max(a, breaks[i]), hi = std::min(b, breaks[i + 1]);
        if (hi > lo)
            sum += integrate(f, lo, hi, tol);
    }
    return sum;
}

inline double factorial(int m)
{
    double v = 1.0;
    for (int i = 2; i <= m; ++i)
        v *= i;
    return v;
}

/// sigma(s) for knots t_1 < ... < t_n and leading sign eps.
inline int sigma(const std::vector<double>& knots, int eps, double s)
{
    int flips = 0;
    for (double t : knots)
        if (s >= t)
            ++flips;
    return (flips % 2 == 0) ? eps : -eps;
}

/// G^(j)(t) = L [j = 0] + (-1)^(r-j) int_t^b (s - t)^(r-j-1) / (r-j-1)! sigma(s) g(s) ds,
/// from Taylor's formula at the anchor b. `end` truncates the half-line.
inline double spline_by_quadrature(int r, int j, const std::vector<double>& knots, int eps, double limit,
                                   const oscispline::WeightFunction& g, double end, double t)
{
    int m = r - j - 1;
    Fn integrand = [&](double s) {
        return std::pow(s - t, m) / factorial(m) * sigma(knots, eps, s) * g(s);
    };
    double v = integrate_pieces(integrand, t, end, knots);
    if ((r - j) % 2 != 0)
        v = -v;
    return (j == 0 ? limit : 0.0) + v;
}

inline std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace testsupport
