#pragma once

#include <functional>
#include <vector>

namespace oscispline {

/// n-point Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
public:
    explicit GaussLegendre(int n);

    /// Shared 15-point rule used by the adaptive integrator and the primitive tables.
    static const GaussLegendre& panel_rule();

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <class F>
    double integrate(F&& f, double a, double b) const
    {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            sum += weights_[i] * f(mid + half * nodes_[i]);
        return half * sum;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Adaptive composite 15-point Gauss-Legendre with interval bisection until the
/// panel estimate and the sum of its halves agree to `abs_tol`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 40);

/// Integral over [a, inf) with geometrically growing panels; stops when a panel
/// contributes less than `panel_tol`. Throws Divergent when the panels keep
/// contributing.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double abs_tol = 1e-12, double panel_tol = 1e-14,
                             double first_width = 0.5, int max_panels = 200);

}  // namespace oscispline
