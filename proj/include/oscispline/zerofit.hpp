#pragma once

#include "oscispline/spline.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace oscispline {

struct ZeroFitOptions {
    /// Residual tolerance relative to Q_r(0) = max |P_r|.
    double zero_tol = 1e-9;
    int max_newton = 60;
    /// Homotopy steps tried before giving up.
    int max_homotopy_steps = 400;
};

/// Knots of the spline that vanishes at prescribed zeros s_1 < ... < s_n and
/// satisfies the anchor conditions of the calculus (limit 0 on the half-line).
struct ZeroFitProblem {
    GCalculus calc;
    std::vector<double> zeros;
    ZeroFitOptions options;
    /// Warm start; defaults to knots interleaved with the zeros.
    std::optional<std::vector<double>> initial_knots;
};

struct ZeroFitResult {
    PerfectGSpline spline;
    double residual = 0.0;  // max_k |G(s_k)|
    int iterations = 0;
    bool used_homotopy = false;
};

/// Damped Newton with an analytic Jacobian; falls back to a homotopy from a
/// spline whose zeros are known. The result is normalized so that G > 0 on
/// (0, s_1), or on (s_1, s_2) when s_1 = 0.
/// Throws ZerosTooClose, NoConvergence (residual attached).
ZeroFitResult fit_knots(const ZeroFitProblem& problem);

/// Finite-difference estimate of d t_i / d s_j around a solution.
Eigen::MatrixXd knot_sensitivity(const ZeroFitProblem& problem, const ZeroFitResult& solution, double h = 1e-5);

/// Implicit-function value of the same Jacobian, -J_t^{-1} J_s.
Eigen::MatrixXd knot_sensitivity_implicit(const ZeroFitProblem& problem, const ZeroFitResult& solution);

}  // namespace oscispline
