#pragma once

#include "oscispline/weights.hpp"

#include <vector>

namespace oscispline {

/// Brute-force verifiers. They integrate splines directly with their own
/// quadrature and share no solver code with the main path.
struct BruteForceConfig {
    /// Points per knot dimension on the coarse level (>= 16).
    int knot_grid_resolution = 32;
    /// Uniform integration panels on [0, T] (>= 16).
    int sample_grid_resolution = 2048;
    /// Half-line truncation point; 0 picks the first T with tail moments below tail_tol.
    double truncation_T = 0.0;
    double tail_tol = 1e-8;
    /// Zoom levels after the coarse grid; each shrinks the box by 4.
    int zoom_levels = 10;
    int zoom_resolution = 8;
};

struct BruteOscillation {
    std::vector<double> knots;
    /// Mean of the lobe levels at the best tuple.
    double C = 0.0;
    /// (max - min) / min of the lobe levels.
    double residual = 0.0;
    std::vector<double> deltas;
    long evaluations = 0;
};

/// Grid search over sorted knot tuples for the most equilibrated n-knot spline.
/// On the half-line the problem is truncated at T and alpha fixes the boundary ratio.
/// n must be 1..3.
BruteOscillation brute_oscillation(int r, int n, const Domain& domain, double alpha, const WeightFunction& f_minus,
                                   const WeightFunction& f_plus, const WeightFunction& g,
                                   const BruteForceConfig& cfg = {});

/// max lambda |x^(k)(0)| over scaled perfect splines x with at most two gridded
/// knots and an optimized limit, with lambda = min(1, delta / ||x||) from a
/// guaranteed upper bound of the norm. A lower bound for the modulus.
double brute_omega_lower_bound(int r, int k, double delta, const WeightFunction& f, const WeightFunction& g,
                               const BruteForceConfig& cfg = {});

/// First T on a geometric ladder with int_T^inf (s - T)^(m-1) / (m-1)! g < tol for m = 1..r.
double oracle_truncation_point(const WeightFunction& g, int r, double tol);

}  // namespace oscispline
