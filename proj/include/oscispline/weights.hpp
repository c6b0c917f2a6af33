#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace oscispline {

/// Either a segment [0, A] or the half-line [0, inf).
struct Domain {
    enum class Kind { Segment, HalfLine };

    Kind kind = Kind::HalfLine;
    double length = std::numeric_limits<double>::infinity();

    static Domain segment(double A);
    static Domain half_line() { return Domain{}; }

    bool is_half_line() const { return kind == Kind::HalfLine; }
    /// Right end of the domain: A or +inf.
    double end() const { return is_half_line() ? std::numeric_limits<double>::infinity() : length; }

    friend bool operator==(const Domain& a, const Domain& b)
    {
        return a.kind == b.kind && (a.is_half_line() || a.length == b.length);
    }
};

struct ConstantFamily {
    double value = 1.0;
};

/// base + amplitude * exp(-rate * t)
struct ExpDecayFamily {
    double base = 0.0;
    double amplitude = 1.0;
    double rate = 1.0;
};

/// base + amplitude * (1 + t)^(-exponent)
struct PowerDecayFamily {
    double base = 0.0;
    double amplitude = 1.0;
    double exponent = 2.0;
};

/// Samples (t_i, w_i) joined by a monotone piecewise-cubic (Fritsch-Carlson)
/// interpolant; constant extension outside the sample range.
struct TabulatedFamily {
    std::vector<double> t;
    std::vector<double> w;
};

using WeightFamily = std::variant<ConstantFamily, ExpDecayFamily, PowerDecayFamily, TabulatedFamily>;

class MonotoneCubic;

/// Positive continuous weight on a segment or on the half-line. Immutable.
class WeightFunction {
public:
    double operator()(double t) const;

    const Domain& domain() const { return domain_; }
    const WeightFamily& family() const { return family_; }
    std::optional<double> limit_at_infinity() const { return limit_; }
    bool monotone_nonincreasing() const { return monotone_; }
    bool is_tabulated() const { return std::holds_alternative<TabulatedFamily>(family_); }

    /// Value at the right end of the domain (the limit on the half-line).
    double end_value() const;

    /// w + c, staying inside the same family.
    WeightFunction shifted(double c) const;
    /// lambda * w, lambda > 0.
    WeightFunction scaled(double lambda) const;
    /// Same formula reinterpreted on another domain (validated again).
    WeightFunction on_domain(const Domain& d) const;

    std::string describe() const;

private:
    friend WeightFunction make_weight(const WeightFamily&, const Domain&);

    WeightFamily family_;
    Domain domain_;
    std::optional<double> limit_;
    bool monotone_ = false;
    std::shared_ptr<const MonotoneCubic> interp_;
};

/// Validates the family parameters on the domain and computes the monotonicity
/// flag and the limit at infinity. Throws NonPositive / MissingLimit.
WeightFunction make_weight(const WeightFamily& family, const Domain& domain);

/// Parses the command-line mini-grammar `family:params`:
///   const:c   exp:base,amp,rate   power:base,amp,exponent   tab:path.csv
WeightFunction parse_weight(const std::string& spec, const Domain& domain);

/// Reads a two-column CSV (t,w); a header line is allowed.
TabulatedFamily load_tabulated_csv(const std::string& path);

struct AssumptionCheck {
    bool pass = true;
    bool heuristic = false;
    std::string detail;
};

struct AssumptionReport {
    AssumptionCheck positivity;       // every weight is > 0 on the domain
    AssumptionCheck monotonicity;     // f-, f+, g non-increasing (half-line only)
    AssumptionCheck limit_positive;   // f-(inf) > 0 and f+(inf) > 0
    AssumptionCheck g_integrable;     // A_0 finite
    AssumptionCheck tail_constants;   // A_1 ... A_{r-1} finite
    AssumptionCheck liminf_condition; // liminf (f(t) - f(inf)) / P_r(t) = 0 for f- and f+
    AssumptionCheck sup_condition;    // sup |P_r| / f < inf for f- and f+

    bool all_pass() const;
    /// (name, check) pairs in a fixed order, for reports.
    std::vector<std::pair<std::string, AssumptionCheck>> items() const;
};

/// Decides the standing assumptions for (f-, f+, g, r). Closed-form families are
/// decided analytically; tabulated weights are sampled and flagged heuristic.
/// On a segment only positivity applies.
AssumptionReport check_assumptions(const WeightFunction& f_minus, const WeightFunction& f_plus,
                                   const WeightFunction& g, int r);

struct NormOptions {
    /// Value of x at infinity (half-line); added as a sup candidate.
    std::optional<double> limit;
    /// Non-increasing bound on |x(t) - limit|; drives the truncation point.
    std::function<double(double)> tail_bound;
    /// Restrict the sup to [0, end]; defaults to the weights' domain.
    std::optional<double> end;
    double rel_tol = 1e-10;
    int samples = 2048;
    /// Truncation point on the half-line when no tail bound is given.
    double default_horizon = 200.0;
    double overflow_guard = 1e300;
};

struct NormResult {
    double value = 0.0;
    double argmax = 0.0;
    bool at_infinity = false;
};

/// sup over the domain of max{x,0}/f+ + max{-x,0}/f-.
NormResult weighted_norm_detail(const std::function<double(double)>& x, const WeightFunction& f_minus,
                                const WeightFunction& f_plus, const NormOptions& options = {});

double weighted_norm(const std::function<double(double)>& x, const WeightFunction& f_minus,
                     const WeightFunction& f_plus, const NormOptions& options = {});

}  // namespace oscispline
