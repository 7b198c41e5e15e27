#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "qsep/analysis.hpp"
#include "qsep/seesaw.hpp"
#include "qsep/separating.hpp"
#include "qsep/tilted_chsh.hpp"

namespace {

using namespace qsep;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void bell_bound(Outcome& out) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (double beta : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const double value = tilted_chsh::bell_value(tilted_chsh::ideal_strategy(tilted_chsh::params_from_beta(beta)), beta);
    worst = std::max(worst, std::abs(value - std::sqrt(8 + 2 * beta * beta)));
  }
  const double at_zero = tilted_chsh::bell_value(tilted_chsh::ideal_strategy(tilted_chsh::params_from_beta(0.0)), 0.0);
  const double elapsed = seconds_since(start);
  out.require(worst <= 1e-9, "bound deviation above 1e-9");
  out.require(std::abs(at_zero - 2 * std::sqrt(2.0)) <= 1e-9, "value at beta=0");
  out.require(elapsed < 1.0, "runtime");
  out.detail << "max deviation " << worst << ", runtime " << elapsed << " s";
}

void table_reproduction(Outcome& out) {
  const auto start = Clock::now();
  double worst = 0.0;
  for (double alpha : {0.3, 0.5, 0.7}) {
    const Correlation p = separating::exact_pstar(alpha);
    for (int x = 0; x < separating::kAliceQuestions; ++x) {
      for (int y = 0; y < separating::kBobQuestions; ++y) {
        if (!separating::is_printed_pair(x, y)) continue;
        const auto t = separating::printed_table(alpha, x, y).entries;
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) worst = std::max(worst, std::abs(t(a, b) - p(x, y, a, b)));
        }
      }
    }
  }
  const Correlation p = separating::exact_pstar(0.5);
  const double spot = std::max({std::abs(p(0, 4, 0, 0) - 0.8), std::abs(p(0, 4, 1, 1) - 0.2),
                                std::abs(p(2, 4, 2, 0) - 0.75), std::abs(p(2, 4, 0, 0) - 0.05)});
  const double elapsed = seconds_since(start);
  out.require(worst <= 1e-12, "printed tables");
  out.require(spot <= 1e-12, "spot values");
  out.require(elapsed < 1.0, "runtime");
  out.detail << "max table deviation " << worst << ", spot deviation " << spot << ", runtime " << elapsed << " s";
}

void truncation_convergence(Outcome& out) {
  const auto start = Clock::now();
  const double alpha = 0.5;
  const Correlation exact = separating::exact_pstar(alpha);
  std::vector<double> gaps;
  for (int m = 3; m <= 10; ++m) {
    const double gap = distance(exact, induce(separating::ideal_truncated_strategy({alpha, m})), Metric::kMaxTv);
    out.require(gap <= 4 * std::pow(alpha, 4 * m), "bound at M=" + std::to_string(m));
    gaps.push_back(gap);
  }
  const double base = std::pow(alpha, -4);
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double ratio = gaps[i - 1] / gaps[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  const double elapsed = seconds_since(start);
  out.require(lo >= base / 2 && hi <= 2 * base, "successive ratios");
  out.require(elapsed < 5.0, "runtime");
  out.detail << "gap at M=10 " << gaps.back() << ", ratios in [" << lo << ", " << hi << "], runtime " << elapsed
             << " s";
}

void block_decomposition(Outcome& out) {
  const Strategy full = separating::ideal_truncated_strategy({0.5, 8});
  const Strategy corner = analysis::restrict_questions(full, {2, 3}, {2, 3});
  const auto d = analysis::strategy_block_decompose(corner, {{0, 1}, {2}}, {{0, 1}, {2}}, 1e-8);
  const double weight_error = std::max(std::abs(d.weights[0] - 0.25), std::abs(d.weights[1] - 0.75));
  double idempotence = 0.0;
  for (const auto& diag : d.diagnostics) idempotence = std::max(idempotence, diag.idempotence);
  const Correlation block = induce(*d.restricted[0]);
  const auto params = tilted_chsh::params_from_alpha(0.5);
  double chsh_error = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const auto t = tilted_chsh::ideal_table(params, x, y).entries;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) chsh_error = std::max(chsh_error, std::abs(block(x, y, a, b) - t(1 - a, 1 - b)));
      }
    }
  }
  out.require(weight_error <= 1e-8, "weights");
  out.require(idempotence <= 1e-9, "idempotence");
  out.require(chsh_error <= 1e-8, "flipped CHSH tables");
  out.detail << "weights (" << d.weights[0] << ", " << d.weights[1] << "), idempotence " << idempotence
             << ", table deviation " << chsh_error;
}

void y4_relations(Outcome& out) {
  double worst = 0.0;
  for (int m : {4, 8}) {
    const auto r = analysis::verify_y4_relations(separating::ideal_truncated_strategy({0.5, m}), 1e-12);
    worst = std::max(worst, r.max_residual());
  }
  out.require(worst <= 1e-12, "residuals");
  out.detail << "max residual " << worst;
}

void schmidt_partition(Outcome& out) {
  const double alpha = 0.5;
  const auto partition = analysis::schmidt_partition(separating::ideal_truncated_strategy({alpha, 8}), 1e-9);
  const auto b = analysis::schmidt_bijections(partition, alpha, 1e-9);
  out.require(partition.union_match.equal && partition.union_match.max_abs_deviation <= 1e-9, "S = S0 u S1");
  out.require(b.s1_vs_alpha_s0.equal && b.s1_vs_alpha_s0.max_abs_deviation <= 1e-9, "S1 = alpha S0");
  out.require(b.s0_minus_s2_vs_alpha_s1.equal && b.s0_minus_s2_vs_alpha_s1.max_abs_deviation <= 1e-9,
              "S0 minus S2 = alpha S1");
  out.require(partition.s2.size() == 1, "single S2 coefficient");
  out.detail << "|S|=" << partition.all.size() << " |S0|=" << partition.s0.size() << " |S1|=" << partition.s1.size()
             << " |S2|=" << partition.s2.size() << ", excluded boundary coefficient " << b.boundary_coefficient;
}

void descent_chain(Outcome& out) {
  const auto start = Clock::now();
  std::ostringstream lengths;
  int previous = 0;
  for (int m = 2; m <= 8; ++m) {
    const Strategy s = separating::ideal_truncated_strategy({0.5, m});
    const auto c = analysis::descent_chain(analysis::schmidt(s.state, s.dA, s.dB).spectrum, 0.5, 1e-6);
    out.require(c.max_length == 2 * m, "length at M=" + std::to_string(m));
    out.require(c.max_length > previous, "growth at M=" + std::to_string(m));
    previous = c.max_length;
    lengths << (m > 2 ? "," : "") << c.max_length;
  }
  const double elapsed = seconds_since(start);
  out.require(elapsed < 5.0, "runtime");
  out.detail << "lengths " << lengths.str() << ", runtime " << elapsed << " s";
}

Correlation chsh_target(double alpha) {
  // Two-outcome ideal strategy padded with an unused third answer.
  Strategy s = tilted_chsh::ideal_strategy(tilted_chsh::params_from_alpha(alpha));
  for (auto* side : {&s.alice, &s.bob}) {
    for (auto& meas : *side) meas.push_back(Matrix::Zero(2, 2));
  }
  return induce(s);
}

void seesaw_sanity(Outcome& out) {
  const auto start = Clock::now();
  seesaw::SeesawConfig chsh;
  chsh.local_dim = 2;
  chsh.restarts = 20;
  chsh.max_outer_iters = 300;
  chsh.seed = 1;
  const auto chsh_result = seesaw::optimize(chsh_target(0.5), chsh);

  const Correlation pstar = separating::exact_pstar(0.5);
  seesaw::SeesawConfig low = chsh;
  low.convergence_tol = 1e-7;
  low.rounding = seesaw::Rounding::kNone;
  const auto d2 = seesaw::optimize(pstar, low);

  seesaw::SeesawConfig high = low;
  high.local_dim = 8;
  high.restarts = 4;
  high.max_outer_iters = 100;
  const auto d8 = seesaw::optimize(pstar, high);
  const double elapsed = seconds_since(start);

  out.require(chsh_result.distance <= 1e-6, "CHSH distance at d=2");
  out.require(chsh_result.rounded && chsh_result.rounded_distance <= 1e-6, "rounded CHSH distance");
  out.require(d8.distance <= d2.distance, "d=8 not above d=2");
  out.require(d2.distance > 0 && d8.distance > 0, "positive gaps");
  out.require(elapsed < 60.0, "runtime");
  out.detail << "CHSH d=2 " << chsh_result.distance << " (rounded " << chsh_result.rounded_distance
             << "), p* d=2 " << d2.distance << ", p* d=8 " << d8.distance << ", runtime " << elapsed << " s";
}

void validators(Outcome& out) {
  Rng rng(99);
  int valid = 0;
  int flagged = 0;
  const fixture::Mutation kinds[] = {fixture::Mutation::kScaledProjector, fixture::Mutation::kDroppedElement,
                                     fixture::Mutation::kDenormalizedState};
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> dim(1, 4);
    std::uniform_int_distribution<int> count(2, 4);
    const Strategy s =
        fixture::random_strategy(dim(rng), dim(rng), count(rng), count(rng), count(rng), count(rng), rng);
    if (validate(s).ok()) ++valid;
    if (!validate(fixture::mutate(s, kinds[i % 3], rng)).ok()) ++flagged;
  }
  out.require(valid == 100, "valid strategies");
  out.require(flagged == 100, "mutations");
  out.detail << valid << "/100 valid pass, " << flagged << "/100 mutations flagged";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1 tilted CHSH bound", bell_bound},
      {"AC2 table reproduction", table_reproduction},
      {"AC3 truncation convergence", truncation_convergence},
      {"AC4 block decomposition", block_decomposition},
      {"AC5 y=4 relations", y4_relations},
      {"AC6 Schmidt partition and bijections", schmidt_partition},
      {"AC7 descent chain", descent_chain},
      {"AC8 see-saw sanity", seesaw_sanity},
      {"AC9 validators", validators},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome out;
    try {
      check(out);
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %s: %s\n", out.passed ? "PASS" : "FAIL", name.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
    if (!out.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
