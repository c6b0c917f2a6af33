#pragma once

#include "oscispline/oscillate.hpp"

#include <optional>
#include <vector>

namespace oscispline {

struct C0Result {
    double C0 = 0.0;
    /// Minimizing shift: P_r + a_star has norm C0.
    double a_star = 0.0;
    /// Points where P_r + a_star reaches +C0 f+ and -C0 f- (inf for a touch at infinity).
    double touch_plus = 0.0;
    double touch_minus = 0.0;
};

/// inf_a ||P_r + a|| for the asymmetric norm with envelopes f-, f+ on the half-line.
/// Throws AssumptionsNotVerified.
C0Result compute_C0(int r, const WeightFunction& f_minus, const WeightFunction& f_plus, const WeightFunction& g);

struct ModulusOptions {
    OscillateOptions oscillate;
    int n_max = 24;
    /// C_n ranges are probed at these alpha values first, then widened.
    double alpha_lo = 1e-4;
    double alpha_hi = 1e4;
    double alpha_extreme = 1e12;
    /// Relative tolerance on the attained norm.
    double norm_tol = 1e-10;
};

struct NormedSpline {
    OscillationSolution solution;
    /// Knot count; 0 for the knotless P_r + a_star.
    int n = 0;
    /// The search stopped at n_max above the requested C; solution is the closest reached.
    bool truncated = false;
};

/// Half-line spline with weighted norm C (f- = f+ = f) that has n knots and
/// n + 1 oscillation points. Throws OutOfRange (C > C_0), NoConvergence,
/// AssumptionsNotVerified.
NormedSpline spline_with_norm(int r, double C, const WeightFunction& f, const WeightFunction& g,
                              const ModulusOptions& options = {});

enum class ModulusRegime { Saturated, SplineDetermined };

const char* to_string(ModulusRegime regime);

struct ModulusResult {
    double delta = 0.0;
    ModulusRegime regime = ModulusRegime::Saturated;
    double omega_value = 0.0;
    std::optional<OscillationSolution> witness;
    int k = 0;
    int n = 0;
    std::optional<double> alpha;
    double C0 = 0.0;
    /// Only an upper estimate: delta lies below the smallest norm reached with n_max knots.
    bool truncated = false;
};

/// Modulus of continuity of the k-th derivative on the weighted class over the half-line.
/// Throws PreconditionViolated (r < 2, k outside [1, r-1], delta <= 0), AssumptionsNotVerified.
ModulusResult omega(int r, int k, double delta, const WeightFunction& f, const WeightFunction& g,
                    const ModulusOptions& options = {});

/// omega over a delta grid, evaluated in parallel; results keep grid order.
std::vector<ModulusResult> omega_curve(int r, int k, const std::vector<double>& deltas, const WeightFunction& f,
                                       const WeightFunction& g, const ModulusOptions& options = {});

struct LeastDeviation {
    double phi = 0.0;
    /// q(t) = sum_i coefficients[i] t^i added to the primitive g_r vanishing at 0.
    std::vector<double> coefficients;
    /// Alternation points of (g_r + q) / f.
    std::vector<double> reference;
    int iterations = 0;
};

/// min over polynomials q of degree < r of ||g_r + q||_{C[0, a_end], f} (Remez exchange).
/// Throws InvalidArgument, OutOfDomain, NoConvergence.
LeastDeviation least_deviating_primitive(int r, double a_end, const WeightFunction& f, const WeightFunction& g,
                                         double tol = 1e-12);

}  // namespace oscispline
