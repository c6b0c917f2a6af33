#pragma once

#include <functional>

namespace oscispline {

struct Extremum {
    double t = 0.0;
    double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [a, b].
/// Endpoints are candidates, so boundary maxima are returned exactly.
Extremum golden_section_max(const std::function<double(double)>& h, double a, double b,
                            double tol, int max_iter = 200);

Extremum golden_section_min(const std::function<double(double)>& h, double a, double b,
                            double tol, int max_iter = 200);

/// Samples h on a uniform grid of `samples` points over [a, b], then polishes the
/// best sample by golden-section search on its neighbouring cell.
Extremum maximize_sampled(const std::function<double(double)>& h, double a, double b,
                          int samples, double rel_tol = 1e-13);

}  // namespace oscispline
