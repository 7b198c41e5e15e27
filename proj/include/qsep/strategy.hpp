#pragma once

#include <span>
#include <string>
#include <vector>

#include "qsep/correlation.hpp"
#include "qsep/linalg.hpp"

namespace qsep {

inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kObservableTol = 1e-9;
inline constexpr double kEigenClusterTol = 1e-8;

/// One projective measurement: element a is the projector for answer a.
using Measurement = std::vector<Matrix>;

/// Finite-dimensional bipartite strategy: a pure state on C^dA (x) C^dB in
/// Alice-major layout plus one projective measurement per question.
struct Strategy {
  int dA = 0;
  int dB = 0;
  Vector state;
  std::vector<Measurement> alice;
  std::vector<Measurement> bob;

  int alice_questions() const { return static_cast<int>(alice.size()); }
  int bob_questions() const { return static_cast<int>(bob.size()); }
  int alice_answers() const { return alice.empty() ? 0 : static_cast<int>(alice.front().size()); }
  int bob_answers() const { return bob.empty() ? 0 : static_cast<int>(bob.front().size()); }
};

enum class Side { kAlice, kBob };

struct ValidationIssue {
  std::string kind;  // shape, state_norm, hermiticity, idempotence, orthogonality, completeness
  Side side = Side::kAlice;
  int question = -1;
  int answer = -1;
  int other_answer = -1;
  double residual = 0.0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

ValidationReport validate(const Strategy& s);

/// p(a,b|x,y) = <psi| P_x^a (x) Q_y^b |psi>. Throws on an invalid strategy.
Correlation induce(const Strategy& s);

/// Real parts of the same expectations in [x][y][a][b] order, without
/// validating the strategy first.
std::vector<double> expectation_table(const Strategy& s);

/// Hermitian matrix with spectrum in {-1, 0, +1}.
class Observable {
 public:
  explicit Observable(Matrix matrix);
  const Matrix& matrix() const { return matrix_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  Matrix matrix_;
};

struct AnswerRouting {
  int plus = 0;
  int minus = 1;
  int kernel = 2;
};

/// Spectral projectors of `o` routed to answers; `num_answers` elements are
/// returned and answers that receive no eigenspace get the zero matrix. A
/// routing index may be out of range when its eigenspace is empty.
Measurement observable_to_projectors(const Observable& o, AnswerRouting routing, int num_answers);

/// (sum_{a in answers} P^a (x) I) |psi> for Alice, or the Bob analogue.
Vector projected_substate(const Strategy& s, Side side, int question, std::span<const int> answers);

struct WeightedStrategy {
  double weight;
  Strategy block;
};

/// Block-diagonal embedding: the state is sum_i sqrt(w_i) psi_i on
/// (+)_i H_A^i (x) (+)_i H_B^i and block i's answers occupy a contiguous
/// range, matching `direct_sum` on correlations.
Strategy direct_sum(std::span<const WeightedStrategy> blocks);

/// Adds an idle ancilla factor C^k on Alice's side in state |0>.
Strategy pad_alice_ancilla(const Strategy& s, int ancilla_dim);

/// Conjugates state and measurements by U (x) V.
Strategy apply_local_unitaries(const Strategy& s, const Matrix& u_alice, const Matrix& u_bob);

std::string side_name(Side side);

}  // namespace qsep
