// qsep: generators, verifiers and the see-saw optimizer on the command line.
//
// Exit codes: 0 success, 1 usage error, 2 verification failure.

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsep/analysis.hpp"
#include "qsep/io.hpp"
#include "qsep/seesaw.hpp"
#include "qsep/separating.hpp"
#include "qsep/tilted_chsh.hpp"

namespace {

using qsep::io::Json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailed = 2;

// Thrown when a check runs to completion and fails.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  double alpha = 0.5;
  int m = 8;
  int dim = 2;
  std::string metric = "max_tv";
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::string out;
  std::string format;
  std::string in;
  std::string against;
  std::vector<int> pair;
  int m_min = 2;
  int m_max = 8;
  std::string alice_partition = "0,1;2";
  std::string bob_partition = "0,1;2";
  std::string xs = "2,3";
  std::string ys = "2,3";
  std::string target = "pstar";
  int restarts = 20;
  int iters = 300;
  int inner = 20;
  int threads = 1;
  double convergence = 1e-9;
  std::string rounding = "projective";
  std::string trace;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    qsep::io::write_file(o.out, text);
  }
}

void emit_json(const Options& o, const Json& j) { emit(o, j.dump(2) + "\n"); }

std::vector<int> parse_ints(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(flag, "expected comma-separated integers, got '" + text + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

qsep::AnswerPartition parse_partition(const std::string& text, const std::string& flag) {
  qsep::AnswerPartition out;
  std::stringstream ss(text);
  std::string block;
  while (std::getline(ss, block, ';')) out.push_back(parse_ints(block, flag));
  if (out.empty()) throw CLI::ValidationError(flag, "empty partition");
  return out;
}

qsep::Strategy load_or_truncate(const Options& o) {
  if (!o.in.empty()) return qsep::io::strategy_from_json(Json::parse(qsep::io::read_file(o.in)));
  return qsep::separating::ideal_truncated_strategy({o.alpha, o.m});
}

qsep::Correlation load_correlation(const std::string& path) {
  const Json j = Json::parse(qsep::io::read_file(path));
  if (j.contains("table")) return qsep::io::correlation_from_json(j, 1e-9);
  return qsep::induce(qsep::io::strategy_from_json(j));
}

bool csv(const Options& o, const char* fallback = "json") {
  const std::string f = o.format.empty() ? fallback : o.format;
  return f == "csv";
}

int cmd_tables(const Options& o) {
  const double tol = o.tol.value_or(1e-12);
  if (!o.pair.empty()) {
    const int x = o.pair[0];
    const int y = o.pair[1];
    if (x < 0 || x >= qsep::separating::kAliceQuestions || y < 0 || y >= qsep::separating::kBobQuestions) {
      throw CLI::ValidationError("--pair", "question pair out of range");
    }
    const bool printed = qsep::separating::is_printed_pair(x, y);
    const qsep::CorrelationTable t = printed ? qsep::separating::printed_table(o.alpha, x, y)
                                             : qsep::separating::exact_pstar(o.alpha, tol).table(x, y);
    Json j = qsep::io::to_json(t);
    j["alpha"] = o.alpha;
    j["closed_form"] = printed;
    emit_json(o, j);
    return kOk;
  }
  const qsep::Correlation p = qsep::separating::exact_pstar(o.alpha, tol);
  if (csv(o)) {
    emit(o, qsep::io::to_csv(p));
  } else {
    emit_json(o, qsep::io::to_json(p));
  }
  return kOk;
}

int cmd_truncate(const Options& o) {
  emit_json(o, qsep::io::to_json(qsep::separating::ideal_truncated_strategy({o.alpha, o.m})));
  return kOk;
}

int cmd_induce(const Options& o) {
  const qsep::Correlation p = qsep::induce(load_or_truncate(o));
  if (csv(o)) {
    emit(o, qsep::io::to_csv(p));
  } else {
    emit_json(o, qsep::io::to_json(p));
  }
  return kOk;
}

int cmd_distance(const Options& o) {
  const qsep::Metric metric = qsep::parse_metric(o.metric);
  Json j = {{"metric", qsep::metric_name(metric)}};
  if (!o.in.empty() || !o.against.empty()) {
    if (o.in.empty() || o.against.empty()) throw CLI::ValidationError("--against", "needs both --in and --against");
    j["distance"] = qsep::distance(load_correlation(o.in), load_correlation(o.against), metric);
  } else {
    j["alpha"] = o.alpha;
    j["m"] = o.m;
    j["distance"] = qsep::separating::truncation_distance(o.alpha, o.m, metric);
  }
  emit_json(o, j);
  return kOk;
}

bool pstar_shaped(const qsep::Strategy& s) {
  return s.alice_questions() == qsep::separating::kAliceQuestions &&
         s.bob_questions() == qsep::separating::kBobQuestions && s.alice_answers() == qsep::separating::kAnswers &&
         s.bob_answers() == qsep::separating::kAnswers;
}

int cmd_schmidt(const Options& o) {
  const qsep::Strategy s = load_or_truncate(o);
  const double tol = o.tol.value_or(1e-9);
  Json j = {{"spectrum", qsep::io::to_json(qsep::analysis::schmidt(s.state, s.dA, s.dB).spectrum)}};
  int code = kOk;
  if (pstar_shaped(s)) {
    const auto partition = qsep::analysis::schmidt_partition(s, tol);
    const auto bijections = qsep::analysis::schmidt_bijections(partition, o.alpha, tol);
    j["partition"] = qsep::io::to_json(partition);
    j["bijections"] = qsep::io::to_json(bijections);
    if (!bijections.passed) code = kFailed;
  }
  emit_json(o, j);
  return code;
}

int cmd_blocks(const Options& o) {
  const qsep::Strategy s = qsep::analysis::restrict_questions(load_or_truncate(o), parse_ints(o.xs, "--xs"),
                                                              parse_ints(o.ys, "--ys"));
  const auto ap = parse_partition(o.alice_partition, "--alice-partition");
  const auto bp = parse_partition(o.bob_partition, "--bob-partition");
  qsep::validate_partition(ap, s.alice_answers(), "alice");
  qsep::validate_partition(bp, s.bob_answers(), "bob");
  try {
    emit_json(o, qsep::io::to_json(qsep::analysis::strategy_block_decompose(s, ap, bp, o.tol.value_or(1e-8))));
  } catch (const std::runtime_error& e) {
    throw VerificationFailure(e.what());
  }
  return kOk;
}

int cmd_y4(const Options& o) {
  const auto report = qsep::analysis::verify_y4_relations(load_or_truncate(o), o.tol.value_or(1e-12));
  emit_json(o, qsep::io::to_json(report));
  if (!report.passed) {
    std::cerr << "y4: max residual " << report.max_residual() << " exceeds tolerance\n";
    return kFailed;
  }
  return kOk;
}

int cmd_chain(const Options& o) {
  if (o.m_min < 2 || o.m_max < o.m_min) throw CLI::ValidationError("--m-max", "need 2 <= m-min <= m-max");
  const double rel = o.tol.value_or(1e-6);
  Json rows = Json::array();
  std::string text = "M,max_chain_length\n";
  for (int m = o.m_min; m <= o.m_max; ++m) {
    const qsep::Strategy s = qsep::separating::ideal_truncated_strategy({o.alpha, m});
    const auto chain =
        qsep::analysis::descent_chain(qsep::analysis::schmidt(s.state, s.dA, s.dB).spectrum, o.alpha, rel);
    rows.push_back({{"M", m}, {"max_chain_length", chain.max_length}});
    text += std::to_string(m) + "," + std::to_string(chain.max_length) + "\n";
  }
  if (csv(o, "csv")) {
    emit(o, text);
  } else {
    emit_json(o, {{"alpha", o.alpha}, {"rel_tol", rel}, {"rows", rows}});
  }
  return kOk;
}

qsep::Correlation chsh_target(double alpha) {
  qsep::Strategy s = qsep::tilted_chsh::ideal_strategy(qsep::tilted_chsh::params_from_alpha(alpha));
  for (auto& meas : s.alice) meas.push_back(qsep::Matrix::Zero(2, 2));
  for (auto& meas : s.bob) meas.push_back(qsep::Matrix::Zero(2, 2));
  return qsep::induce(s);
}

int cmd_seesaw(const Options& o) {
  qsep::Correlation target = o.target == "chsh" ? chsh_target(o.alpha)
                             : o.target == "file"
                                 ? load_correlation(o.in)
                                 : qsep::separating::exact_pstar(o.alpha);
  qsep::seesaw::SeesawConfig cfg;
  cfg.local_dim = o.dim;
  cfg.max_outer_iters = o.iters;
  cfg.inner_iters = o.inner;
  cfg.restarts = o.restarts;
  cfg.seed = o.seed;
  cfg.convergence_tol = o.convergence;
  cfg.threads = o.threads;
  cfg.rounding = o.rounding == "none" ? qsep::seesaw::Rounding::kNone : qsep::seesaw::Rounding::kProjective;
  const auto result = qsep::seesaw::optimize(target, cfg);
  if (!o.trace.empty()) qsep::io::write_file(o.trace, qsep::io::trace_csv(result));
  if (csv(o)) {
    emit(o, qsep::io::trace_csv(result));
    return kOk;
  }
  Json j = qsep::io::to_json(result);
  j["target"] = o.target;
  j["seed"] = o.seed;
  if (o.target == "pstar" && o.dim >= 4 && o.dim % 2 == 0) {
    j["truncation_upper_bound"] = qsep::seesaw::upper_bound_from_truncation(o.alpha, o.dim, qsep::Metric::kL2);
  }
  emit_json(o, j);
  return kOk;
}

struct Check {
  std::string name;
  double residual;
  double tolerance;
};

int cmd_verify(const Options& o) {
  const double tol = o.tol.value_or(1e-9);
  std::vector<Check> checks;
  Json report;
  auto record = [&](const std::string& name, double residual, double tolerance) {
    checks.push_back({name, residual, tolerance});
  };

  const qsep::Strategy s = load_or_truncate(o);
  const qsep::ValidationReport validation = qsep::validate(s);
  report["validation"] = qsep::io::to_json(validation);
  record("validation_issues", static_cast<double>(validation.issues.size()), 0.0);

  if (validation.ok() && pstar_shaped(s)) {
    const auto y4 = qsep::analysis::verify_y4_relations(s, 1e-12);
    report["y4"] = qsep::io::to_json(y4);
    record("y4_relations", y4.max_residual(), 1e-12);
    if (y4.passed) {
      try {
        const auto partition = qsep::analysis::schmidt_partition(s, tol);
        const auto bijections = qsep::analysis::schmidt_bijections(partition, o.alpha, tol);
        report["partition"] = qsep::io::to_json(partition);
        report["bijections"] = qsep::io::to_json(bijections);
        record("schmidt_union", partition.union_match.equal ? 0.0 : partition.union_match.max_abs_deviation, tol);
        record("s1_equals_alpha_s0",
               bijections.s1_vs_alpha_s0.equal ? 0.0 : bijections.s1_vs_alpha_s0.max_abs_deviation, tol);
        record("s0_minus_s2_equals_alpha_s1",
               bijections.s0_minus_s2_vs_alpha_s1.equal ? 0.0 : bijections.s0_minus_s2_vs_alpha_s1.max_abs_deviation,
               tol);
        record("s2_single_coefficient", std::abs(static_cast<double>(partition.s2.size()) - 1.0), 0.0);
        const auto chain = qsep::analysis::descent_chain(partition.all, o.alpha, 1e-6);
        report["chain"] = qsep::io::to_json(chain);
        record("single_descent_chain", std::abs(static_cast<double>(chain.max_length) -
                                                static_cast<double>(partition.all.size())),
               0.0);
      } catch (const std::runtime_error& e) {
        report["schmidt_error"] = e.what();
        record("schmidt_partition", 1.0, tol);
      }
    }
    const double gap =
        qsep::distance(qsep::separating::exact_pstar(o.alpha), qsep::induce(s), qsep::Metric::kMaxTv);
    report["max_tv_to_exact"] = gap;
    try {
      const qsep::Strategy restricted = qsep::analysis::restrict_questions(s, {2, 3}, {2, 3});
      const auto blocks = qsep::analysis::strategy_block_decompose(restricted, {{0, 1}, {2}}, {{0, 1}, {2}}, 1e-8);
      report["blocks"] = qsep::io::to_json(blocks);
      const double a2 = o.alpha * o.alpha;
      // A block weight is a sum of table entries, so it moves by at most twice the table gap.
      record("block_weights", std::max(std::abs(blocks.weights[0] - a2), std::abs(blocks.weights[1] - (1 - a2))),
             1e-8 + 2 * gap);
    } catch (const std::runtime_error& e) {
      report["blocks_error"] = e.what();
      record("block_decomposition", 1.0, 1e-8);
    }
  }

  Json list = Json::array();
  bool ok = true;
  for (const auto& c : checks) {
    const bool passed = c.residual <= c.tolerance;
    ok = ok && passed;
    list.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"passed", passed}});
    if (!passed) std::cerr << "verify: " << c.name << " residual " << c.residual << " exceeds " << c.tolerance << "\n";
  }
  report["checks"] = std::move(list);
  report["passed"] = ok;
  emit_json(o, report);
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite correlation toolkit: tables, truncations, block and Schmidt analysis, see-saw search"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", o.tol, "Tolerance")->check(CLI::PositiveNumber);
  };
  auto add_alpha = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "Tilt parameter in (0,1)")
        ->check(CLI::Validator(
            [](std::string& v) {
              const double a = std::stod(v);
              return (a > 0.0 && a < 1.0) ? std::string{} : std::string("alpha must lie strictly between 0 and 1");
            },
            "(0,1)"));
  };
  auto add_source = [&](CLI::App* sub) {
    add_alpha(sub);
    sub->add_option("--m", o.m, "Truncation blocks M (dimension 2M)")->check(CLI::Range(2, 512));
    sub->add_option("--in", o.in, "Strategy JSON file")->check(CLI::ExistingFile);
  };

  auto* tables = app.add_subcommand("tables", "Closed-form and exact tables of p*");
  add_common(tables);
  add_alpha(tables);
  tables->add_option("--pair", o.pair, "Question pair x y")->expected(2);

  auto* truncate = app.add_subcommand("truncate", "Ideal strategy truncated to dimension 2M");
  add_common(truncate);
  add_alpha(truncate);
  truncate->add_option("--m", o.m, "Truncation blocks M")->check(CLI::Range(2, 512));

  auto* induce = app.add_subcommand("induce", "Correlation induced by a strategy");
  add_common(induce);
  add_source(induce);

  auto* distance = app.add_subcommand("distance", "Distance between correlations");
  add_common(distance);
  add_alpha(distance);
  distance->add_option("--m", o.m, "Truncation blocks M")->check(CLI::Range(2, 512));
  distance->add_option("--in", o.in, "Correlation or strategy JSON")->check(CLI::ExistingFile);
  distance->add_option("--against", o.against, "Second correlation or strategy JSON")->check(CLI::ExistingFile);
  distance->add_option("--metric", o.metric, "Metric")->check(CLI::IsMember({"max_tv", "l2"}));

  auto* schmidt = app.add_subcommand("schmidt", "Schmidt spectrum, partition and bijections");
  add_common(schmidt);
  add_source(schmidt);

  auto* blocks = app.add_subcommand("blocks", "Block decomposition of a strategy");
  add_common(blocks);
  add_source(blocks);
  blocks->add_option("--xs", o.xs, "Alice questions kept, comma separated");
  blocks->add_option("--ys", o.ys, "Bob questions kept, comma separated");
  blocks->add_option("--alice-partition", o.alice_partition, "Answer blocks, e.g. 0,1;2");
  blocks->add_option("--bob-partition", o.bob_partition, "Answer blocks, e.g. 0,1;2");

  auto* y4 = app.add_subcommand("y4", "Operator relations forced by Bob's question 4");
  add_common(y4);
  add_source(y4);

  auto* chain = app.add_subcommand("chain", "Descent-chain length across truncations");
  add_common(chain);
  add_alpha(chain);
  chain->add_option("--m-min", o.m_min, "Smallest M")->check(CLI::Range(2, 512));
  chain->add_option("--m-max", o.m_max, "Largest M")->check(CLI::Range(2, 512));

  auto* seesaw = app.add_subcommand("seesaw", "See-saw search at fixed local dimension");
  add_common(seesaw);
  add_alpha(seesaw);
  seesaw->add_option("--dim", o.dim, "Local dimension d")->check(CLI::Range(1, 64));
  seesaw->add_option("--seed", o.seed, "Seed");
  seesaw->add_option("--target", o.target, "Target correlation")->check(CLI::IsMember({"pstar", "chsh", "file"}));
  seesaw->add_option("--in", o.in, "Target correlation JSON when --target file")->check(CLI::ExistingFile);
  seesaw->add_option("--restarts", o.restarts, "Restarts")->check(CLI::Range(1, 100000));
  seesaw->add_option("--iters", o.iters, "Outer iterations per restart")->check(CLI::Range(1, 1000000));
  seesaw->add_option("--inner", o.inner, "Inner steps per block")->check(CLI::Range(1, 100000));
  seesaw->add_option("--threads", o.threads, "Worker threads, 0 for all cores")->check(CLI::Range(0, 1024));
  seesaw->add_option("--convergence", o.convergence, "Relative-decrease stopping threshold")
      ->check(CLI::NonNegativeNumber);
  seesaw->add_option("--rounding", o.rounding, "Projective rounding")->check(CLI::IsMember({"projective", "none"}));
  seesaw->add_option("--trace", o.trace, "Also write the per-restart trace CSV here");
  seesaw->add_option("--metric", o.metric, "Metric")->check(CLI::IsMember({"l2"}));

  auto* verify = app.add_subcommand("verify", "Full invariant suite");
  add_common(verify);
  add_source(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (tables->parsed()) return cmd_tables(o);
    if (truncate->parsed()) return cmd_truncate(o);
    if (induce->parsed()) return cmd_induce(o);
    if (distance->parsed()) return cmd_distance(o);
    if (schmidt->parsed()) return cmd_schmidt(o);
    if (blocks->parsed()) return cmd_blocks(o);
    if (y4->parsed()) return cmd_y4(o);
    if (chain->parsed()) return cmd_chain(o);
    if (seesaw->parsed()) {
      if (o.target == "file" && o.in.empty()) throw CLI::ValidationError("--in", "--target file needs --in");
      return cmd_seesaw(o);
    }
    if (verify->parsed()) return cmd_verify(o);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kFailed;
  } catch (const Json::exception& e) {
    std::cerr << "bad input file: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
