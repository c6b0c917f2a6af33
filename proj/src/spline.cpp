#include "oscispline/spline.hpp"

#include "oscispline/error.hpp"

#include <algorithm>
#include <cmath>

namespace oscispline {

PerfectGSpline make_spline(const GCalculus& calc, std::vector<double> knots, int leading_sign, double limit_value)
{
    if (leading_sign != 1 && leading_sign != -1)
        throw Error(ErrorKind::InvalidArgument, "leading sign must be +1 or -1");
    if (!std::isfinite(limit_value)) throw Error(ErrorKind::InvalidArgument, "limit value must be finite");
    const double b = calc.anchor();
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i]) || knots[i] <= 0.0 || knots[i] >= b)
            throw Error(ErrorKind::KnotsOutOfRange, "knots must lie strictly inside the domain");
        if (i > 0 && knots[i] < knots[i - 1]) throw Error(ErrorKind::KnotsNotSorted, "knots must increase");
    }
    // coincident pairs cancel
    std::vector<double> kept;
    for (double t : knots) {
        if (!kept.empty() && t - kept.back() < 1e-12) kept.pop_back();
        else kept.push_back(t);
    }

    PerfectGSpline s;
    s.r_ = calc.order();
    s.knots_ = std::move(kept);
    s.eps_ = leading_sign;
    s.limit_ = calc.g().domain().is_half_line() ? limit_value : 0.0;
    s.calc_ = calc;
    const int r = s.r_;
    s.knot_q_.resize(s.knots_.size() * (r + 1));
    for (std::size_t k = 0; k < s.knots_.size(); ++k)
        calc.Q_all(s.knots_[k], std::span<double>(&s.knot_q_[k * (r + 1)], r + 1));
    return s;
}

PerfectGSpline make_segment_spline(int r, double A, std::vector<double> knots, int leading_sign,
                                   const GCalculus& calc)
{
    if (calc.order() != r) throw Error(ErrorKind::InvalidArgument, "calculus order differs from r");
    if (calc.g().domain().is_half_line() || calc.anchor() != A)
        throw Error(ErrorKind::DomainMismatch, "calculus is not built on [0, A]");
    return make_spline(calc, std::move(knots), leading_sign, 0.0);
}

PerfectGSpline make_halfline_spline(int r, std::vector<double> knots, int leading_sign, double limit_value,
                                    const GCalculus& calc)
{
    if (calc.order() != r) throw Error(ErrorKind::InvalidArgument, "calculus order differs from r");
    if (!calc.g().domain().is_half_line()) throw Error(ErrorKind::DomainMismatch, "calculus is not on the half-line");
    return make_spline(calc, std::move(knots), leading_sign, limit_value);
}

int PerfectGSpline::sign_at(double t) const
{
    const auto passed = std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin();
    return (passed % 2 == 0) ? eps_ : -eps_;
}

void PerfectGSpline::eval_all(double t, std::span<double> out) const
{
    const int r = r_;
    if (t == INFINITY && domain().is_half_line()) {
        out[0] = limit_;
        for (int j = 1; j < r; ++j) out[j] = 0.0;
        return;
    }
    if (!(t >= 0.0) || t > calc_.anchor()) throw Error(ErrorKind::OutOfDomain, "t outside the spline domain");

    double q[32];
    calc_.Q_all(t, std::span<double>(q, r + 1));
    const int sigma = sign_at(t);
    const std::size_t first = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), t) - knots_.begin());

    for (int j = 0; j < r; ++j) {
        const int m = r - j - 1;
        double acc = sigma * q[m + 1];
        for (std::size_t k = first; k < knots_.size(); ++k) {
            const double d = knots_[k] - t;
            const double* qk = &knot_q_[k * (r + 1)];
            double F = 0.0, c = 1.0;
            for (int i = m; i >= 0; --i) {
                F += c * qk[i + 1];
                c *= d / (m - i + 1);
            }
            // knot k is t_{k+1} in 1-based numbering
            acc += ((k % 2 == 0) ? -2.0 : 2.0) * eps_ * F;
        }
        out[j] = ((r - j) % 2 == 0 ? acc : -acc) + (j == 0 ? limit_ : 0.0);
    }
}

double PerfectGSpline::eval(int j, double t) const
{
    if (j < 0 || j > r_) throw Error(ErrorKind::InvalidArgument, "derivative order out of range");
    if (j == r_) {
        if (t == INFINITY) return 0.0;
        if (!(t >= 0.0) || t > calc_.anchor()) throw Error(ErrorKind::OutOfDomain, "t outside the spline domain");
        return sign_at(t) * calc_.g()(t);
    }
    double buf[32];
    eval_all(t, std::span<double>(buf, r_));
    return buf[j];
}

double PerfectGSpline::knot_derivative(int j, int k, double t) const
{
    if (j < 0 || j >= r_) throw Error(ErrorKind::InvalidArgument, "derivative order out of range");
    if (k < 0 || k >= knot_count()) throw Error(ErrorKind::InvalidArgument, "knot index out of range");
    const double tk = knots_[k];
    if (!(t < tk)) return 0.0;
    const int m = r_ - j - 1;
    double p = 1.0;
    for (int i = 1; i <= m; ++i) p *= (tk - t) / i;
    const double g = knot_q_[k * (r_ + 1)];
    const double jump = ((k % 2 == 0) ? -2.0 : 2.0) * eps_;
    const double v = -jump * p * g;
    return ((r_ - j) % 2 == 0) ? v : -v;
}

PerfectGSpline PerfectGSpline::negated() const
{
    PerfectGSpline s = *this;
    s.eps_ = -eps_;
    s.limit_ = -limit_;
    return s;
}

PerfectGSpline PerfectGSpline::with_limit(double limit) const
{
    PerfectGSpline s = *this;
    s.limit_ = domain().is_half_line() ? limit : 0.0;
    return s;
}

std::vector<SplineZero> sign_changes_and_zeros(const PerfectGSpline& spline, int j, double a, double b, int samples)
{
    if (!(a < b) || !std::isfinite(b)) throw Error(ErrorKind::InvalidArgument, "need a finite interval a < b");
    std::vector<double> grid;
    samples = std::max(samples, 8);
    for (int i = 0; i <= samples; ++i) grid.push_back(a + (b - a) * i / samples);
    for (double t : spline.knots())
        if (t > a && t < b) grid.push_back(t);
    std::sort(grid.begin(), grid.end());

    std::vector<double> v(grid.size());
    double scale = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = spline.eval(j, grid[i]);
        scale = std::max(scale, std::abs(v[i]));
    }
    const double tiny = 1e-14 * scale;
    auto sgn = [&](double x) { return std::abs(x) <= tiny ? 0 : (x > 0 ? 1 : -1); };

    std::vector<SplineZero> zeros;
    std::size_t last = grid.size();  // index of last sample with a definite sign
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const int s = sgn(v[i]);
        if (s == 0) continue;
        if (last != grid.size()) {
            const int sl = sgn(v[last]);
            if (sl != s) {
                if (i == last + 1) {
                    double lo = grid[last], hi = grid[i];
                    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const int sm = sgn(spline.eval(j, mid));
                        if (sm == 0) { lo = hi = mid; break; }
                        (sm == sl ? lo : hi) = mid;
                    }
                    zeros.push_back({0.5 * (lo + hi), true});
                } else {
                    zeros.push_back({0.5 * (grid[last + 1] + grid[i - 1]), true});
                }
            } else if (i > last + 1) {
                zeros.push_back({0.5 * (grid[last + 1] + grid[i - 1]), false});
            }
        }
        last = i;
    }
    return zeros;
}

}  // namespace oscispline
