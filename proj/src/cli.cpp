#include "oscispline/cli.hpp"

#include "oscispline/error.hpp"
#include "oscispline/modulus.hpp"
#include "oscispline/oracle.hpp"
#include "oscispline/parallel.hpp"
#include "oscispline/serialize.hpp"
#include "oscispline/zerofit.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace oscispline {

namespace {

struct Params {
    int r = 1, k = 1, n = 1, eps = 1, points = 201;
    int max_newton = 60, max_equalize = 400;
    double A = 0.0, alpha = 1.0, limit = 0.0, t_max = 10.0, tol = 1e-11;
    std::string g = "exp:0,1,1", f, f_minus, f_plus;
    std::string domain = "half";
    std::string alpha_grid, delta_grid, a_grid, zeros, knots, t_grid;
    std::string path = "continuation";
    std::string format = "csv", out = "-", witness_json;
    bool cold = false;
};

std::vector<double> parse_list(const std::string& s, const char* name)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            v.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, std::string("bad number in --") + name + ": " + item);
        }
    }
    if (v.empty()) throw Error(ErrorKind::InvalidArgument, std::string("--") + name + " is empty");
    return v;
}

std::string quoted(const std::string& s)
{
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

std::string join(const std::vector<double>& v, char sep = ';')
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + format_double(v[i]);
    return s;
}

Domain domain_of(const Params& p)
{
    if (p.domain == "segment") {
        if (!(p.A > 0.0)) throw Error(ErrorKind::InvalidArgument, "--A must be positive for a segment");
        return Domain::segment(p.A);
    }
    if (p.domain != "half") throw Error(ErrorKind::InvalidArgument, "--domain must be half or segment");
    return Domain::half_line();
}

struct Weights {
    WeightFunction fm, fp, g;
};

Weights weights_of(const Params& p, const Domain& d)
{
    const std::string fm = !p.f_minus.empty() ? p.f_minus : (!p.f.empty() ? p.f : "const:1");
    const std::string fp = !p.f_plus.empty() ? p.f_plus : (!p.f.empty() ? p.f : "const:1");
    return Weights{parse_weight(fm, d), parse_weight(fp, d), parse_weight(p.g, d)};
}

HalfLinePath path_of(const std::string& s)
{
    if (s == "continuation") return HalfLinePath::Continuation;
    if (s == "direct") return HalfLinePath::Direct;
    if (s == "truncated") return HalfLinePath::TruncatedOnly;
    throw Error(ErrorKind::InvalidArgument, "--path must be continuation, direct or truncated");
}

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, std::string("--") + name + " must be positive");
}

// Output sink: --out file or the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback)
    {
        if (path != "-") {
            file_.open(path);
            if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

void emit_json(const Params& p, const Json& config, Json body, std::ostream& out)
{
    body["config"] = config;
    Sink sink(p.out, out);
    sink.stream() << body.dump(2) << '\n';
}

int cmd_check(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = domain_of(p);
    const Weights w = weights_of(p, d);
    const AssumptionReport rep = check_assumptions(w.fm, w.fp, w.g, p.r);
    if (p.format == "json") {
        emit_json(p, config, Json{{"report", to_json(rep)}}, out);
    } else {
        Sink sink(p.out, out);
        CsvWriter csv(sink.stream(), config, {"assumption", "pass", "heuristic", "detail"});
        for (const auto& [name, c] : rep.items())
            csv.cell(name).cell(c.pass ? 1 : 0).cell(c.heuristic ? 1 : 0).cell(quoted(c.detail)).end_row();
    }
    return kExitOk;
}

int cmd_pk_table(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = domain_of(p);
    const GCalculus calc = build_calculus(parse_weight(p.g, d), p.r);
    std::vector<double> ts;
    if (!p.t_grid.empty()) {
        ts = parse_list(p.t_grid, "t-grid");
    } else {
        require_positive(p.t_max, "t-max");
        if (p.points < 2) throw Error(ErrorKind::InvalidArgument, "--points must be at least 2");
        for (int i = 0; i < p.points; ++i) ts.push_back(p.t_max * i / (p.points - 1));
    }
    std::vector<std::string> cols{"t"};
    for (int k = 0; k <= p.r; ++k) cols.push_back("P" + std::to_string(k));
    Sink sink(p.out, out);
    CsvWriter csv(sink.stream(), config, cols);
    for (double t : ts) {
        csv.cell(t);
        for (int k = 0; k <= p.r; ++k) csv.cell(eval_Pk(calc, k, t));
        csv.end_row();
    }
    return kExitOk;
}

int cmd_zerofit(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = domain_of(p);
    ZeroFitProblem prob{build_calculus(parse_weight(p.g, d), p.r), parse_list(p.zeros, "zeros"), {}, std::nullopt};
    const ZeroFitResult res = fit_knots(prob);
    if (p.format == "json") {
        emit_json(p, config, Json{{"result", to_json(res)}}, out);
    } else {
        Sink sink(p.out, out);
        CsvWriter csv(sink.stream(), config, {"index", "zero", "knot", "residual"});
        for (std::size_t i = 0; i < prob.zeros.size(); ++i)
            csv.cell(static_cast<long>(i + 1)).cell(prob.zeros[i]).cell(res.spline.knots()[i])
                .cell(std::abs(res.spline.eval(0, prob.zeros[i]))).end_row();
    }
    return kExitOk;
}

OscillateOptions osc_options(const Params& p)
{
    require_positive(p.tol, "tol");
    OscillateOptions o;
    o.tol = p.tol;
    o.path = path_of(p.path);
    if (p.max_newton < 0 || p.max_equalize < 0)
        throw Error(ErrorKind::InvalidArgument, "iteration limits must be non-negative");
    o.max_newton = p.max_newton;
    o.max_equalize = p.max_equalize;
    o.throw_on_failure = false;
    return o;
}

int cmd_oscillate(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = domain_of(p);
    const Weights w = weights_of(p, d);
    const OscillateOptions o = osc_options(p);
    const OscillationSolution sol = d.is_half_line() ? oscillate_halfline(p.r, p.n, p.alpha, w.fm, w.fp, w.g, o)
                                                     : oscillate_segment(p.r, p.n, p.A, w.fm, w.fp, w.g, o);
    const int code = sol.diagnostics.converged ? kExitOk : kExitNoConvergence;
    if (p.format == "json") {
        emit_json(p, config, Json{{"solution", to_json(sol)}}, out);
        return code;
    }
    // plot-ready samples of G and the envelopes
    const double end = d.is_half_line() ? p.t_max : p.A;
    Sink sink(p.out, out);
    Json cfg = config;
    cfg["C"] = sol.C;
    cfg["knots"] = sol.spline.knots();
    cfg["converged"] = sol.diagnostics.converged;
    CsvWriter csv(sink.stream(), cfg, {"t", "G", "upper", "lower"});
    for (int i = 0; i < p.points; ++i) {
        const double t = end * i / std::max(1, p.points - 1);
        csv.cell(t).cell(sol.spline.eval(0, t)).cell(sol.C * w.fp(t)).cell(-sol.C * w.fm(t)).end_row();
    }
    return code;
}

int cmd_cn(const Params& p, const Json& config, std::ostream& out)
{
    const Weights w = weights_of(p, Domain::half_line());
    const CnCurve curve = cn_curve(p.r, p.n, parse_list(p.alpha_grid, "alpha-grid"), w.fm, w.fp, w.g, osc_options(p), !p.cold);
    Sink sink(p.out, out);
    Json cfg = config;
    cfg["monotonicity_warning"] = curve.monotonicity_warning;
    CsvWriter csv(sink.stream(), cfg, {"alpha", "C", "converged", "residual", "knots"});
    int code = kExitOk;
    for (const auto& pt : curve.points) {
        if (!pt.ok) code = kExitNoConvergence;
        csv.cell(pt.alpha).cell(pt.solution ? pt.C : NAN).cell(pt.ok ? 1 : 0)
            .cell(pt.solution ? pt.solution->diagnostics.residual : NAN)
            .cell(pt.solution ? join(pt.solution->spline.knots()) : std::string())
            .end_row();
    }
    return code;
}

int cmd_modulus(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = Domain::half_line();
    const WeightFunction f = parse_weight(p.f.empty() ? "const:1" : p.f, d);
    const WeightFunction g = parse_weight(p.g, d);
    const std::vector<double> deltas = parse_list(p.delta_grid, "delta-grid");
    for (double x : deltas) require_positive(x, "delta-grid");
    ModulusOptions mo;
    mo.oscillate = osc_options(p);

    struct Row {
        std::optional<ModulusResult> res;
        std::string error;
        bool no_convergence = false;
    };
    // argument errors surface before any computation
    if (p.r < 2 || p.k < 1 || p.k > p.r - 1)
        throw Error(ErrorKind::PreconditionViolated, "the modulus needs r >= 2 and 1 <= k <= r-1");
    const auto rows = parallel_map(deltas, [&](double delta) {
        Row row;
        try {
            row.res = omega(p.r, p.k, delta, f, g, mo);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoConvergence) throw;
            row.error = e.what();
            row.no_convergence = true;
        }
        return row;
    });

    int code = kExitOk;
    Json witnesses = Json::array();
    Sink sink(p.out, out);
    CsvWriter csv(sink.stream(), config, {"delta", "omega", "regime", "n", "alpha", "truncated"});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& row = rows[i];
        if (!row.res) {
            code = kExitNoConvergence;
            csv.cell(deltas[i]).cell(NAN).cell(std::string("NoConvergence")).cell(-1L).cell(NAN).cell(0L).end_row();
            witnesses.push_back(Json{{"delta", deltas[i]}, {"error", row.error}});
            continue;
        }
        const ModulusResult& m = *row.res;
        csv.cell(m.delta).cell(m.omega_value).cell(std::string(to_string(m.regime))).cell(m.n)
            .cell(m.alpha ? *m.alpha : NAN).cell(m.truncated ? 1 : 0).end_row();
        witnesses.push_back(to_json(m));
    }
    if (!p.witness_json.empty()) {
        std::ofstream wj(p.witness_json);
        if (!wj) throw Error(ErrorKind::InvalidArgument, "cannot open " + p.witness_json);
        wj << Json{{"config", config}, {"rows", witnesses}}.dump(2) << '\n';
    }
    return code;
}

int cmd_least_dev(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = Domain::half_line();
    const WeightFunction f = parse_weight(p.f.empty() ? "const:1" : p.f, d);
    const WeightFunction g = parse_weight(p.g, d);
    const std::vector<double> grid = parse_list(p.a_grid, "a-grid");
    Sink sink(p.out, out);
    CsvWriter csv(sink.stream(), config, {"a_end", "phi", "coefficients"});
    for (double a : grid) {
        const LeastDeviation ld = least_deviating_primitive(p.r, a, f, g);
        csv.cell(a).cell(ld.phi).cell(join(ld.coefficients)).end_row();
    }
    return kExitOk;
}

int cmd_oracle_verify(const Params& p, const Json& config, std::ostream& out)
{
    const Domain H = Domain::half_line();
    const WeightFunction f = parse_weight(p.f.empty() ? "const:1" : p.f, H);
    const WeightFunction g = parse_weight(p.g, H);
    const double A = p.A > 0 ? p.A : 4.0;
    Sink sink(p.out, out);
    CsvWriter csv(sink.stream(), config, {"r", "n", "domain", "C_solver", "C_oracle", "difference", "pass"});
    bool all = true;
    for (int r = 1; r <= 2; ++r)
        for (int n = 1; n <= 2; ++n)
            for (const bool half : {false, true}) {
                const OscillationSolution s =
                    half ? oscillate_halfline(r, n, p.alpha, f, f, g) : oscillate_segment(r, n, A, f, f, g);
                const BruteOscillation b =
                    brute_oscillation(r, n, half ? H : Domain::segment(A), p.alpha, f, f, g);
                const bool ok = std::abs(s.C - b.C) <= 1e-3;
                all = all && ok;
                csv.cell(r).cell(n).cell(std::string(half ? "half" : "segment")).cell(s.C).cell(b.C)
                    .cell(s.C - b.C).cell(std::string(ok ? "PASS" : "FAIL")).end_row();
            }
    return all ? kExitOk : kExitValidation;
}

int cmd_sample(const Params& p, const Json& config, std::ostream& out)
{
    const Domain d = domain_of(p);
    const GCalculus calc = build_calculus(parse_weight(p.g, d), p.r);
    const std::vector<double> knots = p.knots.empty() ? std::vector<double>{} : parse_list(p.knots, "knots");
    const PerfectGSpline s = make_spline(calc, knots, p.eps, d.is_half_line() ? p.limit : 0.0);
    const double end = d.is_half_line() ? p.t_max : p.A;
    std::vector<std::string> cols{"t"};
    for (int j = 0; j <= p.r; ++j) cols.push_back("G" + std::to_string(j));
    Sink sink(p.out, out);
    CsvWriter csv(sink.stream(), config, cols);
    std::vector<double> v(static_cast<std::size_t>(p.r));
    for (int i = 0; i < p.points; ++i) {
        const double t = end * i / std::max(1, p.points - 1);
        csv.cell(t);
        for (int j = 0; j <= p.r; ++j) csv.cell(s.eval(j, t));
        csv.end_row();
    }
    return kExitOk;
}

// "--config file.json" becomes "--key value" tokens placed before the
// command-line ones, so explicit arguments win.
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::vector<std::string> rest, from_file;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config" && i + 1 < args.size()) path = args[++i];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
        else {
            rest.push_back(args[i]);
            continue;
        }
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open config " + path);
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw Error(ErrorKind::InvalidArgument, std::string("bad config JSON: ") + e.what());
        }
        if (!j.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (value.is_boolean()) {
                if (value.get<bool>()) from_file.push_back("--" + key);
                continue;
            }
            from_file.push_back("--" + key);
            if (value.is_object()) {
                from_file.push_back(weight_spec_from_json(value));
            } else if (value.is_array()) {
                std::string s;
                for (const auto& x : value) s += (s.empty() ? "" : ",") + (x.is_string() ? x.get<std::string>() : x.dump());
                from_file.push_back(s);
            } else {
                from_file.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
        }
    }
    if (from_file.empty() || rest.empty()) return rest;
    std::vector<std::string> out{rest.front()};
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err)
{
    Params p;
    CLI::App app{"Maximally oscillating perfect g-splines and weighted moduli of continuity", "oscispline"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    auto weights = [&](CLI::App* s, bool split) {
        s->add_option("--g", p.g, "weight g: const:c | exp:base,amp,rate | power:base,amp,p | tab:file.csv")
            ->capture_default_str();
        s->add_option("--f", p.f, "envelope f (both sides)");
        if (split) {
            s->add_option("--f-minus", p.f_minus, "lower envelope f-");
            s->add_option("--f-plus", p.f_plus, "upper envelope f+");
        }
    };
    auto out_opts = [&](CLI::App* s, bool json) {
        s->add_option("--out", p.out, "output file, - for stdout")->capture_default_str();
        if (json) s->add_option("--format", p.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };
    auto domain = [&](CLI::App* s) {
        s->add_option("--domain", p.domain, "half or segment")->check(CLI::IsMember({"half", "segment"}))->capture_default_str();
        s->add_option("--A", p.A, "segment length");
    };
    auto order = [&](CLI::App* s) { s->add_option("--r", p.r, "order r")->check(CLI::Range(1, 12))->capture_default_str(); };
    auto solver = [&](CLI::App* s) {
        s->add_option("--tol", p.tol, "equioscillation tolerance")->capture_default_str();
        s->add_option("--path", p.path, "half-line path: continuation, direct, truncated")->capture_default_str();
        s->add_option("--max-newton", p.max_newton, "Newton iterations")->capture_default_str();
        s->add_option("--max-equalize", p.max_equalize, "equalization sweeps")->capture_default_str();
    };

    std::map<std::string, int (*)(const Params&, const Json&, std::ostream&)> handlers;

    auto* check = app.add_subcommand("check", "decide the standing assumptions");
    order(check), weights(check, true), domain(check), out_opts(check, true);
    handlers["check"] = cmd_check;

    auto* pk = app.add_subcommand("pk-table", "tabulate P_0 ... P_r");
    order(pk), domain(pk), out_opts(pk, false);
    pk->add_option("--g", p.g, "weight g")->capture_default_str();
    pk->add_option("--t-grid", p.t_grid, "comma-separated abscissae");
    pk->add_option("--t-max", p.t_max, "grid end")->capture_default_str();
    pk->add_option("--points", p.points, "grid size")->capture_default_str();
    handlers["pk-table"] = cmd_pk_table;

    auto* zf = app.add_subcommand("zerofit", "knots of the spline with prescribed zeros");
    order(zf), domain(zf), out_opts(zf, true);
    zf->add_option("--g", p.g, "weight g")->capture_default_str();
    zf->add_option("--zeros", p.zeros, "comma-separated zeros")->required();
    handlers["zerofit"] = cmd_zerofit;

    auto* osc = app.add_subcommand("oscillate", "maximally oscillating spline with n knots");
    order(osc), weights(osc, true), domain(osc), out_opts(osc, true), solver(osc);
    osc->add_option("--n", p.n, "knot count")->check(CLI::NonNegativeNumber)->capture_default_str();
    osc->add_option("--alpha", p.alpha, "boundary ratio at infinity")->capture_default_str();
    osc->add_option("--t-max", p.t_max, "sampling end on the half-line")->capture_default_str();
    osc->add_option("--points", p.points, "samples")->capture_default_str();
    handlers["oscillate"] = cmd_oscillate;

    auto* cn = app.add_subcommand("cn", "C_n over an alpha grid");
    order(cn), weights(cn, true), out_opts(cn, false), solver(cn);
    cn->add_option("--n", p.n, "knot count")->check(CLI::PositiveNumber)->capture_default_str();
    cn->add_option("--alpha-grid", p.alpha_grid, "comma-separated increasing alphas")->required();
    cn->add_flag("--cold", p.cold, "solve grid points independently in parallel");
    handlers["cn"] = cmd_cn;

    auto* mod = app.add_subcommand("modulus", "modulus of continuity of the k-th derivative");
    order(mod), weights(mod, false), out_opts(mod, false), solver(mod);
    mod->add_option("--k", p.k, "derivative order")->capture_default_str();
    mod->add_option("--delta-grid", p.delta_grid, "comma-separated deltas")->required();
    mod->add_option("--witness-json", p.witness_json, "write witness splines as JSON");
    handlers["modulus"] = cmd_modulus;

    auto* ld = app.add_subcommand("least-dev", "least deviating r-th primitive on [0, a]");
    order(ld), weights(ld, false), out_opts(ld, false);
    ld->add_option("--a-grid", p.a_grid, "comma-separated right ends")->required();
    handlers["least-dev"] = cmd_least_dev;

    auto* ov = app.add_subcommand("oracle-verify", "compare the solver with brute force for r, n <= 2");
    weights(ov, false), out_opts(ov, false);
    ov->add_option("--A", p.A, "segment length (default 4)");
    ov->add_option("--alpha", p.alpha, "half-line alpha")->capture_default_str();
    handlers["oracle-verify"] = cmd_oracle_verify;

    auto* smp = app.add_subcommand("sample", "sample a spline and its derivatives");
    order(smp), domain(smp), out_opts(smp, false);
    smp->add_option("--g", p.g, "weight g")->capture_default_str();
    smp->add_option("--knots", p.knots, "comma-separated knots");
    smp->add_option("--eps", p.eps, "leading sign")->check(CLI::IsMember({-1, 1}))->capture_default_str();
    smp->add_option("--limit", p.limit, "value at infinity")->capture_default_str();
    smp->add_option("--t-max", p.t_max, "sampling end on the half-line")->capture_default_str();
    smp->add_option("--points", p.points, "samples")->capture_default_str();
    handlers["sample"] = cmd_sample;

    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    Json config{{"subcommand", sub->get_name()}};
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help" || opt->get_name() == "-h") continue;
        std::string name = opt->get_name();
        name.erase(0, name.find_first_not_of('-'));
        if (opt->count() > 0) config[name] = opt->as<std::string>();
        else if (!opt->get_default_str().empty()) config[name] = opt->get_default_str();
    }
    // envelopes default through each other; record what is actually used
    if (sub->get_option_no_throw("--f")) {
        const std::string f = p.f.empty() ? "const:1" : p.f;
        if (sub->get_option_no_throw("--f-minus")) {
            config.erase("f");
            config["f-minus"] = p.f_minus.empty() ? f : p.f_minus;
            config["f-plus"] = p.f_plus.empty() ? f : p.f_plus;
        } else {
            config["f"] = f;
        }
    }

    try {
        if (p.points < 2) throw Error(ErrorKind::InvalidArgument, "--points must be at least 2");
        return handlers.at(sub->get_name())(p, config, out);
    } catch (const Error& e) {
        err << e.what();
        if (e.kind() == ErrorKind::NoConvergence) err << " (residual " << format_double(e.residual()) << ")";
        err << '\n';
        return e.kind() == ErrorKind::NoConvergence ? kExitNoConvergence : kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

int run(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace oscispline
