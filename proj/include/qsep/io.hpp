#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qsep/analysis.hpp"
#include "qsep/correlation.hpp"
#include "qsep/seesaw.hpp"
#include "qsep/strategy.hpp"

namespace qsep::io {

using Json = nlohmann::json;

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

Json to_json(const Correlation& p);
Correlation correlation_from_json(const Json& j, double normalization_tol = kNormalizationTol);
/// x,y,a,b,value rows with a header line.
std::string to_csv(const Correlation& p);

Json to_json(const CorrelationTable& t);

Json to_json(const Strategy& s);
/// Parses dimensions, state and measurements; does not validate.
Strategy strategy_from_json(const Json& j);

Json to_json(const ValidationReport& r);
Json to_json(const analysis::SchmidtSpectrum& s);
Json to_json(const analysis::MultisetMatch& m);
Json to_json(const analysis::Y4Report& r);
Json to_json(const analysis::SchmidtPartition& p);
Json to_json(const analysis::BijectionReport& r);
Json to_json(const analysis::DescentChain& c);
Json to_json(const analysis::BlockDecomposition& b);

Json to_json(const seesaw::PovmStrategy& s);
/// Summary plus the best strategy: projective form when rounded, POVM form otherwise.
Json to_json(const seesaw::SeesawResult& r);
/// restart,iter,objective rows with a header line.
std::string trace_csv(const seesaw::SeesawResult& r);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace qsep::io
