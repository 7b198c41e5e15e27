#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsep/correlation.hpp"
#include "qsep/strategy.hpp"

namespace qsep::seesaw {

enum class Rounding { kNone, kProjective };

struct SeesawConfig {
  int local_dim = 2;
  int max_outer_iters = 300;
  int inner_iters = 20;  // conditional-gradient steps per block per outer iteration
  int restarts = 20;
  std::uint64_t seed = 0;
  double convergence_tol = 1e-9;  // stop when the relative decrease per outer iteration falls below this
  Metric metric = Metric::kL2;
  Rounding rounding = Rounding::kProjective;
  int threads = 1;  // 0 picks the hardware concurrency

  void validate() const;
};

/// Mixed state on C^d (x) C^d with POVMs on each side.
struct PovmStrategy {
  int dim = 0;
  Matrix density;
  std::vector<std::vector<Matrix>> alice;  // [x][a]
  std::vector<std::vector<Matrix>> bob;    // [y][b]
};

/// tr(rho E_x^a (x) F_y^b) in [x][y][a][b] order.
std::vector<double> povm_table(const PovmStrategy& s);

struct RestartTrace {
  std::vector<double> objective;  // squared l2 distance after each outer iteration, index 0 is the initial point
  int iterations = 0;
  bool converged = false;
};

struct SeesawResult {
  PovmStrategy best;
  double distance = 0.0;  // l2 distance of the best iterate
  int best_restart = -1;
  std::vector<RestartTrace> traces;
  bool converged = false;  // whether the best restart met the stopping rule
  std::optional<Strategy> rounded;
  double rounded_distance = 0.0;
  int dilated_alice_dim = 0;
  int dilated_bob_dim = 0;
};

SeesawResult optimize(const Correlation& target, const SeesawConfig& cfg);

/// Projective strategy reproducing the POVM statistics: each POVM is dilated
/// with an ancilla in |0> and rho is purified by a register on Alice's side.
Strategy dilate(const PovmStrategy& s, double rank_cutoff = 1e-12);

/// Distance reached by the truncated ideal strategy at local dimension d.
double upper_bound_from_truncation(double alpha, int d, Metric metric);

}  // namespace qsep::seesaw
