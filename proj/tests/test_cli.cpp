#include "doctest.h"

#include "oscispline/cli.hpp"
#include "oscispline/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace oscispline;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        v.push_back(l);
    return v;
}

std::vector<std::string> cells(const std::string& line)
{
    std::vector<std::string> v;
    std::istringstream in(line);
    for (std::string c; std::getline(in, c, ',');)
        v.push_back(c);
    return v;
}

}  // namespace

TEST_CASE("format_double round-trips")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0}) {
        std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("csv writer")
{
    std::ostringstream out;
    CsvWriter w(out, Json{{"r", 2}}, {"a", "b"});
    w.cell(1).cell(0.25);
    w.end_row();
    CHECK(out.str() == "# {\"r\":2}\na,b\n1,0.25\n");
    w.cell(1);
    CHECK_THROWS(w.end_row());
}

TEST_CASE("weight objects from json")
{
    CHECK(weight_spec_from_json(Json{{"family", "exp"}, {"rate", 2}}) == "exp:0,1,2");
    CHECK(weight_spec_from_json(Json{{"family", "const"}, {"value", 3}}) == "const:3");
    CHECK_THROWS(weight_spec_from_json(Json{{"family", "cubic"}}));
}

TEST_CASE("cn reproduces the r = 1 closed form")
{
    auto r = cli({"cn", "--r", "1", "--n", "1", "--alpha-grid", "0.5,1,2,4"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0].rfind("# {", 0) == 0);
    CHECK(ls[1] == "alpha,C,converged,residual,knots");
    double alphas[] = {0.5, 1.0, 2.0, 4.0};
    for (int i = 0; i < 4; ++i) {
        auto c = cells(ls[i + 2]);
        double a = alphas[i];
        CHECK(std::stod(c[1]) == doctest::Approx((1 + a) / (2 * (2 + a))).epsilon(1e-9));
        CHECK(std::stod(c[4]) == doctest::Approx(std::log(2 + a)).epsilon(1e-9));
    }
}

TEST_CASE("reruns are byte-identical")
{
    std::vector<std::string> args{"modulus", "--r", "2", "--k", "1", "--delta-grid", "0.2,0.6"};
    auto a = cli(args);
    auto b = cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto cold = cli({"cn", "--r", "2", "--n", "2", "--alpha-grid", "0.5,2", "--cold"});
    auto cold2 = cli({"cn", "--r", "2", "--n", "2", "--alpha-grid", "0.5,2", "--cold"});
    CHECK(cold.out == cold2.out);
}

TEST_CASE("header carries the resolved configuration")
{
    auto r = cli({"least-dev", "--r", "1", "--a-grid", "1,3"});
    REQUIRE(r.code == 0);
    auto header = lines(r.out)[0];
    auto cfg = Json::parse(header.substr(2));
    CHECK(cfg["subcommand"] == "least-dev");
    CHECK(cfg["r"] == "1");
    CHECK(cfg["g"] == "exp:0,1,1");
}

TEST_CASE("config file with command-line override")
{
    std::string path = "cli_test_config.json";
    {
        std::ofstream out(path);
        out << R"({"r": 1, "n": 1, "alpha-grid": [1, 2], "g": {"family": "exp", "rate": 1}})";
    }
    auto r = cli({"cn", "--config", path, "--alpha-grid", "4"});
    std::remove(path.c_str());
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(std::stod(cells(ls[2])[1]) == doctest::Approx(5.0 / 12.0));
}

TEST_CASE("output file")
{
    std::string path = "cli_test_out.csv";
    auto r = cli({"pk-table", "--r", "2", "--t-grid", "0,1", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(path.c_str());
    CHECK(lines(ss.str()).size() == 4);
}

TEST_CASE("json output parses")
{
    auto r = cli({"oscillate", "--r", "2", "--n", "1", "--alpha", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j.contains("config"));
    CHECK(j.dump().find("0.1877") != std::string::npos);
}

TEST_CASE("exit codes")
{
    CHECK(cli({"modulus", "--r", "1", "--delta-grid", "0.1"}).code == kExitValidation);
    CHECK(cli({"cn", "--r", "2", "--n", "1", "--alpha-grid", "2,1"}).code == kExitValidation);
    CHECK(cli({"check", "--g", "spline:2"}).code == kExitValidation);
    CHECK(cli({"frobnicate"}).code == kExitValidation);
    auto stalled = cli({"oscillate", "--r", "2", "--n", "2", "--alpha", "1", "--max-newton", "0", "--max-equalize", "1"});
    CHECK(stalled.code == kExitNoConvergence);
    // partial results are still written, flagged in the header
    CHECK(stalled.out.find("\"converged\":false") != std::string::npos);
    CHECK(cli({"check", "--r", "2", "--g", "power:0,1,1"}).code == kExitOk);
    CHECK(cli({"--help"}).code == kExitOk);
}
