#include "oscispline/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oscispline {

namespace {

const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

Extremum golden_section_max(const std::function<double(double)>& h, double a, double b,
                            double tol, int max_iter)
{
    if (b < a) std::swap(a, b);
    const double ha = h(a);
    const double hb = h(b);

    double lo = a, hi = b;
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double hc = h(c), hd = h(d);
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        if (hc >= hd) {
            hi = d;
            d = c;
            hd = hc;
            c = hi - kInvPhi * (hi - lo);
            hc = h(c);
        } else {
            lo = c;
            c = d;
            hc = hd;
            d = lo + kInvPhi * (hi - lo);
            hd = h(d);
        }
    }
    Extremum best{c, hc};
    if (hd > best.value) best = {d, hd};
    if (ha > best.value) best = {a, ha};
    if (hb > best.value) best = {b, hb};
    return best;
}

Extremum golden_section_min(const std::function<double(double)>& h, double a, double b,
                            double tol, int max_iter)
{
    Extremum e = golden_section_max([&](double t) { return -h(t); }, a, b, tol, max_iter);
    e.value = -e.value;
    return e;
}

Extremum maximize_sampled(const std::function<double(double)>& h, double a, double b,
                          int samples, double rel_tol)
{
    samples = std::max(samples, 3);
    const double step = (b - a) / (samples - 1);
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double t = (i == samples - 1) ? b : a + i * step;
        const double v = h(t);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = a + std::max(best - 1, 0) * step;
    const double hi = std::min(b, a + std::min(best + 1, samples - 1) * step);
    Extremum e = golden_section_max(h, lo, hi, rel_tol * std::max(b - a, 1e-300));
    if (best_value > e.value) e = {a + best * step, best_value};
    return e;
}

}  // namespace oscispline
