#include "oscispline/serialize.hpp"

#include "oscispline/error.hpp"

#include <cmath>
#include <cstdio>

namespace oscispline {

namespace {

// JSON has no infinity; emit it as a string
Json number(double v)
{
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json numbers(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

}  // namespace

std::string weight_spec_from_json(const Json& j)
{
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw Error(ErrorKind::InvalidArgument, "weight object needs a \"family\" string");
    const std::string family = j["family"].get<std::string>();
    auto num = [&](const char* key, double fallback) {
        if (!j.contains(key)) return format_double(fallback);
        if (!j[key].is_number()) throw Error(ErrorKind::InvalidArgument, std::string("weight field ") + key + " must be a number");
        return format_double(j[key].get<double>());
    };
    if (family == "const" || family == "constant") return "const:" + num("value", 1.0);
    if (family == "exp") return "exp:" + num("base", 0.0) + "," + num("amplitude", 1.0) + "," + num("rate", 1.0);
    if (family == "power")
        return "power:" + num("base", 0.0) + "," + num("amplitude", 1.0) + "," + num("exponent", 2.0);
    if (family == "tab" || family == "tabulated") {
        if (!j.contains("path") || !j["path"].is_string())
            throw Error(ErrorKind::InvalidArgument, "tabulated weight needs a \"path\"");
        return "tab:" + j["path"].get<std::string>();
    }
    throw Error(ErrorKind::InvalidArgument, "unknown weight family " + family);
}

WeightFunction weight_from_json(const Json& j, const Domain& domain)
{
    return parse_weight(weight_spec_from_json(j), domain);
}

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Json to_json(const Domain& d)
{
    if (d.is_half_line()) return Json{{"kind", "half_line"}};
    return Json{{"kind", "segment"}, {"length", d.length}};
}

Json to_json(const WeightFunction& w)
{
    Json j{{"spec", w.describe()}, {"domain", to_json(w.domain())}, {"monotone", w.monotone_nonincreasing()}};
    if (w.limit_at_infinity()) j["limit"] = number(*w.limit_at_infinity());
    if (const auto* t = std::get_if<TabulatedFamily>(&w.family())) {
        j["t"] = t->t;
        j["w"] = t->w;
    }
    return j;
}

Json to_json(const AssumptionReport& report)
{
    Json j = Json::object();
    for (const auto& [name, c] : report.items())
        j[name] = Json{{"pass", c.pass}, {"heuristic", c.heuristic}, {"detail", c.detail}};
    j["all_pass"] = report.all_pass();
    return j;
}

Json to_json(const PerfectGSpline& s)
{
    return Json{{"order", s.order()},
                {"knots", numbers(s.knots())},
                {"leading_sign", s.leading_sign()},
                {"limit", s.limit_value()},
                {"domain", to_json(s.domain())},
                {"g", s.calculus().g().describe()}};
}

Json to_json(const OscillationSolution& s)
{
    Json j{{"spline", to_json(s.spline)},
           {"C", s.C},
           {"oscillation_points", numbers(s.oscillation_points)},
           {"solver_zeros", numbers(s.solver_zeros)},
           {"diagnostics",
            {{"equalize_iterations", s.diagnostics.equalize_iterations},
             {"newton_iterations", s.diagnostics.newton_iterations},
             {"residual", s.diagnostics.residual},
             {"deltas", numbers(s.diagnostics.deltas)},
             {"path", s.diagnostics.path},
             {"converged", s.diagnostics.converged}}}};
    if (s.alpha) j["alpha"] = *s.alpha;
    return j;
}

Json to_json(const ZeroFitResult& r)
{
    return Json{{"spline", to_json(r.spline)},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"used_homotopy", r.used_homotopy}};
}

Json to_json(const C0Result& r)
{
    return Json{{"C0", r.C0}, {"a_star", r.a_star}, {"touch_plus", number(r.touch_plus)},
                {"touch_minus", number(r.touch_minus)}};
}

Json to_json(const ModulusResult& r)
{
    Json j{{"delta", r.delta}, {"regime", to_string(r.regime)}, {"omega", r.omega_value}, {"k", r.k},
           {"n", r.n},         {"C0", r.C0},                     {"truncated", r.truncated}};
    if (r.alpha) j["alpha"] = *r.alpha;
    if (r.witness) j["witness"] = to_json(*r.witness);
    return j;
}

Json to_json(const LeastDeviation& r)
{
    return Json{{"phi", r.phi},
                {"coefficients", numbers(r.coefficients)},
                {"reference", numbers(r.reference)},
                {"iterations", r.iterations}};
}

Json to_json(const BruteOscillation& r)
{
    return Json{{"knots", numbers(r.knots)},
                {"C", r.C},
                {"residual", r.residual},
                {"deltas", numbers(r.deltas)},
                {"evaluations", r.evaluations}};
}

CsvWriter::CsvWriter(std::ostream& out, const Json& config, const std::vector<std::string>& columns)
    : out_(out), columns_(columns.size())
{
    out_ << "# " << config.dump() << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v)
{
    return cell(format_double(v));
}

CsvWriter& CsvWriter::cell(long v)
{
    return cell(std::to_string(v));
}

CsvWriter& CsvWriter::cell(const std::string& v)
{
    if (filled_ >= columns_) throw Error(ErrorKind::InvalidArgument, "too many CSV cells in a row");
    out_ << (filled_++ ? "," : "") << v;
    return *this;
}

void CsvWriter::end_row()
{
    if (filled_ != columns_) throw Error(ErrorKind::InvalidArgument, "incomplete CSV row");
    out_ << '\n';
    filled_ = 0;
}

}  // namespace oscispline
