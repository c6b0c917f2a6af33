#pragma once

#include "oscispline/spline.hpp"
#include "oscispline/weights.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oscispline {

enum class HalfLinePath {
    /// Solve on a truncated segment, then polish on the half-line.
    Continuation,
    /// Start on the half-line from mass-fraction zeros.
    Direct,
    /// Truncated segment only; the half-line spline reuses its knots.
    TruncatedOnly,
};

const char* to_string(HalfLinePath path);

struct OscillateOptions {
    /// Target for max_k |delta_k - delta_min| / delta_min.
    double tol = 1e-11;
    /// Residual accepted when the Newton phase stalls.
    double accept_tol = 1e-8;
    int max_newton = 60;
    int max_equalize = 400;
    /// Equalization hands over to Newton below this residual.
    double switch_residual = 1e-3;
    int lobe_samples = 96;
    HalfLinePath path = HalfLinePath::Continuation;
    /// Relative size of the neglected tail when truncating the half-line.
    double truncation_tol = 1e-13;
    /// Warm start: zeros of G - G(inf), as returned in OscillationSolution::solver_zeros.
    std::optional<std::vector<double>> initial_zeros;
    bool throw_on_failure = true;
};

struct OscillationDiagnostics {
    int equalize_iterations = 0;
    int newton_iterations = 0;
    /// max_k |delta_k - delta_min| / delta_min
    double residual = 0.0;
    std::vector<double> deltas;
    std::string path;
    bool converged = false;
};

struct OscillationSolution {
    PerfectGSpline spline;
    double C = 0.0;
    /// s_1 < ... < s_{n+1}; odd (1-based) points touch +C f+, even ones -C f-.
    std::vector<double> oscillation_points;
    std::optional<double> alpha;
    /// Zeros of G - G(inf) (of G on a segment); pass back as initial_zeros to warm start.
    std::vector<double> solver_zeros;
    OscillationDiagnostics diagnostics;
};

/// n-knot spline on [0, A] with G^(j)(A) = 0 equioscillating n + 1 times
/// between -C f- and C f+. n = 0 gives the anchored knotless spline.
/// Throws InvalidEnvelope, NoConvergence (unless throw_on_failure is false).
OscillationSolution oscillate_segment(int r, int n, double A, const WeightFunction& f_minus,
                                      const WeightFunction& f_plus, const WeightFunction& g,
                                      const OscillateOptions& options = {});

/// n-knot half-line spline with n + 1 oscillation points and
/// (C f+(inf) - G(inf)) / (C f-(inf) + G(inf)) = alpha.
/// Throws AssumptionsNotVerified, NoConvergence.
OscillationSolution oscillate_halfline(int r, int n, double alpha, const WeightFunction& f_minus,
                                       const WeightFunction& f_plus, const WeightFunction& g,
                                       const OscillateOptions& options = {});

double compute_Cn(int r, int n, double alpha, const WeightFunction& f_minus, const WeightFunction& f_plus,
                  const WeightFunction& g, const OscillateOptions& options = {});

struct CnPoint {
    double alpha = 0.0;
    double C = 0.0;
    bool ok = false;
    std::string error;
    std::optional<OscillationSolution> solution;
};

struct CnCurve {
    std::vector<CnPoint> points;
    /// C_n should be non-decreasing in alpha for odd n and non-increasing for even n.
    bool monotonicity_warning = false;
};

/// C_n over an increasing alpha grid. With warm_start the grid is walked in
/// order reusing the previous zeros; otherwise points are solved in parallel.
CnCurve cn_curve(int r, int n, const std::vector<double>& alpha_grid, const WeightFunction& f_minus,
                 const WeightFunction& f_plus, const WeightFunction& g, const OscillateOptions& options = {},
                 bool warm_start = true);

}  // namespace oscispline
