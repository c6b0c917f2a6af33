#include "oscispline/quadrature.hpp"

#include "oscispline/error.hpp"

#include <cmath>
#include <numbers>

namespace oscispline {

GaussLegendre::GaussLegendre(int n) : nodes_(n), weights_(n)
{
    // Newton iteration on P_n from the Chebyshev-like initial guesses.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes_[i] = -x;
        nodes_[n - 1 - i] = x;
        weights_[i] = w;
        weights_[n - 1 - i] = w;
    }
    if (n % 2 == 1) nodes_[n / 2] = 0.0;
}

const GaussLegendre& GaussLegendre::panel_rule()
{
    static const GaussLegendre rule(15);
    return rule;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double whole, double abs_tol, int depth)
{
    const GaussLegendre& rule = GaussLegendre::panel_rule();
    const double mid = 0.5 * (a + b);
    const double left = rule.integrate(f, a, mid);
    const double right = rule.integrate(f, mid, b);
    if (depth <= 0 || std::abs(left + right - whole) <= abs_tol)
        return left + right;
    return adaptive_step(f, a, mid, left, 0.5 * abs_tol, depth - 1) +
           adaptive_step(f, mid, b, right, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth)
{
    if (a == b) return 0.0;
    const double whole = GaussLegendre::panel_rule().integrate(f, a, b);
    return adaptive_step(f, a, b, whole, abs_tol, max_depth);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double abs_tol, double panel_tol, double first_width, int max_panels)
{
    double sum = 0.0;
    double lo = a;
    double width = first_width;
    int quiet = 0;
    for (int i = 0; i < max_panels; ++i) {
        const double hi = lo + width;
        const double part = integrate_adaptive(f, lo, hi, abs_tol);
        if (!std::isfinite(part))
            throw Error(ErrorKind::Divergent, "tail integrand is not finite");
        sum += part;
        quiet = std::abs(part) < panel_tol ? quiet + 1 : 0;
        if (quiet >= 2) return sum;
        lo = hi;
        width *= 1.5;
    }
    throw Error(ErrorKind::Divergent, "tail integral did not converge", std::abs(sum));
}

}  // namespace oscispline
