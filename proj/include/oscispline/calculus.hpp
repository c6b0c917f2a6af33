#pragma once

#include "oscispline/weights.hpp"

#include <memory>
#include <span>
#include <vector>

namespace oscispline {

struct CalculusOptions {
    double quad_tol = 1e-12;
    /// Use the quadrature table even when a closed form exists (for testing).
    bool force_quadrature = false;
};

/// Iterated primitives of g anchored at the right end b of its domain:
///
///     Q_k(t) = int_t^b (s - t)^(k-1) / (k-1)! g(s) ds,   Q_0 = g,
///
/// so that P_k = (-1)^k Q_k is the k-th primitive of g vanishing with all its
/// derivatives at b (b = inf on the half-line, b = A on a segment).
/// Immutable after construction; cheap to copy.
class GCalculus {
public:
    int order() const;
    const WeightFunction& g() const;
    /// A on a segment, +inf on the half-line.
    double anchor() const;
    bool closed_form() const;

    /// Tail constants A_0 ... A_{r-1}, A_k = int_0^b s^k / k! g(s) ds.
    const std::vector<double>& tail_constants() const;

    double Q(int k, double t) const;
    /// Q_0(t) ... Q_r(t) into out (size r + 1).
    void Q_all(double t, std::span<double> out) const;
    double P(int k, double t) const;
    /// g_k(t) = k-th primitive of g vanishing with its derivatives at 0.
    double gk(int k, double t) const;

private:
    friend GCalculus build_calculus(const WeightFunction&, int, const CalculusOptions&);
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Throws Divergent when the tail constants do not exist on the half-line.
GCalculus build_calculus(const WeightFunction& g, int r, const CalculusOptions& options = {});

/// P_k(t); throws OutOfDomain outside [0, b] and NotFinite on overflow.
double eval_Pk(const GCalculus& calc, int k, double t);

/// |limit_value| + |P_r(t)|: the bound on |x(t)| for x with |x^(r)| <= g and x(inf) = limit_value.
double envelope_bound(const GCalculus& calc, double limit_value, double t);

}  // namespace oscispline
