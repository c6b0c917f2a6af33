#pragma once

#include "oscispline/modulus.hpp"
#include "oscispline/oracle.hpp"
#include "oscispline/zerofit.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace oscispline {

using Json = nlohmann::json;

Json to_json(const Domain& domain);
Json to_json(const WeightFunction& w);
Json to_json(const AssumptionReport& report);
Json to_json(const PerfectGSpline& spline);
Json to_json(const OscillationSolution& solution);
Json to_json(const ZeroFitResult& result);
Json to_json(const C0Result& result);
Json to_json(const ModulusResult& result);
Json to_json(const LeastDeviation& result);
Json to_json(const BruteOscillation& result);

/// Weight object such as {"family": "exp", "base": 0, "amplitude": 1, "rate": 1}
/// converted to the command-line grammar; "tab" takes {"path": ...}.
std::string weight_spec_from_json(const Json& j);
WeightFunction weight_from_json(const Json& j, const Domain& domain);

/// Shortest text that reads back to the same double (17 significant digits at most).
std::string format_double(double v);

/// CSV with a leading "# {config}" line; cells are written as given.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const Json& config, const std::vector<std::string>& columns);
    CsvWriter& cell(double v);
    CsvWriter& cell(long v);
    CsvWriter& cell(int v) { return cell(static_cast<long>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

}  // namespace oscispline
