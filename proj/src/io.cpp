#include "qsep/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsep::io {

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("complex entries are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from(const Json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw std::invalid_argument("matrix has wrong row count");
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != dim) {
      throw std::invalid_argument("matrix has wrong column count");
    }
    for (int k = 0; k < dim; ++k) m(i, k) = complex_from(j[i][k]);
  }
  return m;
}

Json measurements_json(const std::vector<std::vector<Matrix>>& meas) {
  Json out = Json::array();
  for (const auto& question : meas) {
    Json answers = Json::array();
    for (const auto& op : question) answers.push_back(matrix_json(op));
    out.push_back(std::move(answers));
  }
  return out;
}

std::vector<Measurement> measurements_from(const Json& j, int dim) {
  std::vector<Measurement> out;
  for (const auto& question : j) {
    Measurement meas;
    for (const auto& op : question) meas.push_back(matrix_from(op, dim));
    out.push_back(std::move(meas));
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

Json to_json(const Correlation& p) {
  Json table = Json::array();
  for (int x = 0; x < p.m(); ++x) {
    Json xs = Json::array();
    for (int y = 0; y < p.n(); ++y) {
      Json ys = Json::array();
      for (int a = 0; a < p.r(); ++a) {
        Json as = Json::array();
        for (int b = 0; b < p.s(); ++b) as.push_back(p(x, y, a, b));
        ys.push_back(std::move(as));
      }
      xs.push_back(std::move(ys));
    }
    table.push_back(std::move(xs));
  }
  return {{"m", p.m()}, {"n", p.n()}, {"r", p.r()}, {"s", p.s()}, {"table", std::move(table)}};
}

Correlation correlation_from_json(const Json& j, double normalization_tol) {
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  const int r = j.at("r").get<int>();
  const int s = j.at("s").get<int>();
  const Json& table = j.at("table");
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m) * n * r * s);
  auto expect = [](const Json& node, int size) {
    if (!node.is_array() || static_cast<int>(node.size()) != size) {
      throw std::invalid_argument("correlation table does not match its declared shape");
    }
  };
  expect(table, m);
  for (const auto& xs : table) {
    expect(xs, n);
    for (const auto& ys : xs) {
      expect(ys, r);
      for (const auto& as : ys) {
        expect(as, s);
        for (const auto& v : as) flat.push_back(v.get<double>());
      }
    }
  }
  return Correlation(m, n, r, s, std::move(flat), normalization_tol);
}

std::string to_csv(const Correlation& p) {
  std::string out = "x,y,a,b,value\n";
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      for (int a = 0; a < p.r(); ++a) {
        for (int b = 0; b < p.s(); ++b) {
          out += std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(a) + "," + std::to_string(b) +
                 "," + format_double(p(x, y, a, b)) + "\n";
        }
      }
    }
  }
  return out;
}

Json to_json(const CorrelationTable& t) {
  Json rows = Json::array();
  for (int a = 0; a < t.entries.rows(); ++a) {
    Json row = Json::array();
    for (int b = 0; b < t.entries.cols(); ++b) row.push_back(t.entries(a, b));
    rows.push_back(std::move(row));
  }
  return {{"x", t.x}, {"y", t.y}, {"table", std::move(rows)}};
}

Json to_json(const Strategy& s) {
  Json state = Json::array();
  for (int i = 0; i < s.state.size(); ++i) state.push_back(complex_json(s.state(i)));
  return {{"dA", s.dA},
          {"dB", s.dB},
          {"state", std::move(state)},
          {"alice_meas", measurements_json(s.alice)},
          {"bob_meas", measurements_json(s.bob)}};
}

Strategy strategy_from_json(const Json& j) {
  Strategy s;
  s.dA = j.at("dA").get<int>();
  s.dB = j.at("dB").get<int>();
  if (s.dA < 1 || s.dB < 1) throw std::invalid_argument("strategy dimensions must be positive");
  const Json& state = j.at("state");
  s.state.resize(static_cast<Eigen::Index>(state.size()));
  for (std::size_t i = 0; i < state.size(); ++i) s.state(static_cast<Eigen::Index>(i)) = complex_from(state[i]);
  s.alice = measurements_from(j.at("alice_meas"), s.dA);
  s.bob = measurements_from(j.at("bob_meas"), s.dB);
  return s;
}

Json to_json(const ValidationReport& r) {
  Json issues = Json::array();
  for (const auto& issue : r.issues) {
    issues.push_back({{"kind", issue.kind},
                      {"side", side_name(issue.side)},
                      {"question", issue.question},
                      {"answer", issue.answer},
                      {"other_answer", issue.other_answer},
                      {"residual", issue.residual},
                      {"message", issue.message}});
  }
  return {{"ok", r.ok()}, {"issues", std::move(issues)}};
}

Json to_json(const analysis::SchmidtSpectrum& s) {
  return {{"coefficients", s.coefficients}, {"zero_cutoff", s.zero_cutoff}, {"size", s.size()}};
}

Json to_json(const analysis::MultisetMatch& m) {
  Json pairs = Json::array();
  for (const auto& [l, r] : m.pairs) pairs.push_back(Json::array({l, r}));
  return {{"equal", m.equal}, {"max_abs_deviation", m.max_abs_deviation}, {"pairs", std::move(pairs)}};
}

Json to_json(const analysis::Y4Report& r) {
  return {{"a0_b4_answer0", r.a0_b4_answer0}, {"a0_a2_answer0", r.a0_a2_answer0},
          {"a0_b4_answer1", r.a0_b4_answer1}, {"a0_a2_answer1", r.a0_a2_answer1},
          {"reconstruction", r.reconstruction}, {"max_residual", r.max_residual()},
          {"passed", r.passed}};
}

Json to_json(const analysis::SchmidtPartition& p) {
  return {{"all", to_json(p.all)},
          {"s0", to_json(p.s0)},
          {"s1", to_json(p.s1)},
          {"s2", to_json(p.s2)},
          {"union_match", to_json(p.union_match)},
          {"s2_subset_of_s0", p.s2_subset_of_s0}};
}

Json to_json(const analysis::BijectionReport& r) {
  return {{"s1_vs_alpha_s0", to_json(r.s1_vs_alpha_s0)},
          {"s0_minus_s2_vs_alpha_s1", to_json(r.s0_minus_s2_vs_alpha_s1)},
          {"boundary_coefficient", r.boundary_coefficient},
          {"s0_contains_s2", r.s0_contains_s2},
          {"passed", r.passed}};
}

Json to_json(const analysis::DescentChain& c) {
  return {{"ratio", c.ratio}, {"rel_tol", c.rel_tol}, {"chains", c.chains}, {"max_length", c.max_length}};
}

Json to_json(const analysis::BlockDecomposition& b) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < b.weights.size(); ++i) {
    const auto& d = b.diagnostics[i];
    Json block = {{"weight", b.weights[i]},
                  {"alice_dim", b.alice_bases[i].cols()},
                  {"bob_dim", b.bob_bases[i].cols()},
                  {"alice_question_dependence", d.alice_question_dependence},
                  {"bob_question_dependence", d.bob_question_dependence},
                  {"alice_bob_mismatch", d.alice_bob_mismatch},
                  {"idempotence", d.idempotence},
                  {"restricted_completeness", d.restricted_completeness},
                  {"weight_mismatch", d.weight_mismatch},
                  {"induced_mismatch", d.induced_mismatch}};
    if (b.restricted[i]) block["strategy"] = to_json(*b.restricted[i]);
    blocks.push_back(std::move(block));
  }
  return {{"blocks", std::move(blocks)},
          {"substate_overlap", b.substate_overlap},
          {"alice_null_dim", b.alice_null_dim},
          {"bob_null_dim", b.bob_null_dim}};
}

Json to_json(const seesaw::PovmStrategy& s) {
  return {{"dim", s.dim},
          {"density", matrix_json(s.density)},
          {"alice_povm", measurements_json(s.alice)},
          {"bob_povm", measurements_json(s.bob)}};
}

Json to_json(const seesaw::SeesawResult& r) {
  Json restarts = Json::array();
  for (const auto& t : r.traces) {
    restarts.push_back(
        {{"iterations", t.iterations}, {"converged", t.converged}, {"final_objective", t.objective.back()}});
  }
  Json out = {{"distance", r.distance},
              {"best_restart", r.best_restart},
              {"converged", r.converged},
              {"local_dim", r.best.dim},
              {"restarts", std::move(restarts)}};
  if (r.rounded) {
    out["rounding"] = "projective";
    out["rounded_distance"] = r.rounded_distance;
    out["dilated_alice_dim"] = r.dilated_alice_dim;
    out["dilated_bob_dim"] = r.dilated_bob_dim;
    out["strategy"] = to_json(*r.rounded);
  } else {
    out["rounding"] = "none";
    out["povm_strategy"] = to_json(r.best);
  }
  return out;
}

std::string trace_csv(const seesaw::SeesawResult& r) {
  std::string out = "restart,iter,objective\n";
  for (std::size_t k = 0; k < r.traces.size(); ++k) {
    const auto& values = r.traces[k].objective;
    for (std::size_t i = 0; i < values.size(); ++i) {
      out += std::to_string(k) + "," + std::to_string(i) + "," + format_double(values[i]) + "\n";
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

}  // namespace qsep::io
