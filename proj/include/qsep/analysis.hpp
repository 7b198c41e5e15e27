#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsep/correlation.hpp"
#include "qsep/strategy.hpp"

namespace qsep::analysis {

inline constexpr double kZeroCutoff = 1e-9;
inline constexpr double kMultisetRelTol = 1e-8;

/// Nonzero Schmidt coefficients in descending order.
struct SchmidtSpectrum {
  std::vector<double> coefficients;
  double zero_cutoff = kZeroCutoff;

  std::size_t size() const { return coefficients.size(); }
};

struct SchmidtDecomposition {
  SchmidtSpectrum spectrum;
  Matrix alice_basis;  // dA x k, column i pairs with coefficient i
  Matrix bob_basis;    // dB x k
};

/// SVD of the dA x dB coefficient matrix of a unit vector.
SchmidtDecomposition schmidt(const Vector& state, int dA, int dB, double zero_cutoff = kZeroCutoff);

/// Same, without the unit-norm precondition; coefficients keep the vector's scale.
SchmidtSpectrum schmidt_coefficients(const Vector& vector, int dA, int dB, double zero_cutoff = kZeroCutoff);

/// Elementwise comparison of two multisets after sorting both descending.
struct MultisetMatch {
  bool equal = false;
  double max_abs_deviation = 0.0;
  std::vector<std::pair<double, double>> pairs;
};

MultisetMatch match_multisets(std::vector<double> lhs, std::vector<double> rhs, double rel_tol = kMultisetRelTol);

/// lhs with one matching element removed per element of rhs; nullopt if some
/// element of rhs has no match within rel_tol.
std::optional<std::vector<double>> multiset_difference(const std::vector<double>& lhs, const std::vector<double>& rhs,
                                                       double rel_tol = kMultisetRelTol);

std::vector<double> scaled(const std::vector<double>& values, double factor);

// ---------------------------------------------------------------------------
// Block decomposition of a strategy whose correlation is a direct sum.

struct BlockDiagnostics {
  double alice_question_dependence = 0.0;  // max_x |P_x^{A_i} psi - P_0^{A_i} psi|
  double bob_question_dependence = 0.0;
  double alice_bob_mismatch = 0.0;         // |P^{A_i} psi - Q^{B_i} psi|
  double idempotence = 0.0;                // max over restricted operators
  double restricted_completeness = 0.0;
  double weight_mismatch = 0.0;            // | |psi_i|^2 - w_i |
  double induced_mismatch = 0.0;           // max_tv(induce(restricted), p_i)
};

struct BlockDecomposition {
  std::vector<double> weights;
  std::vector<Vector> substates;  // unnormalized, in the full space
  std::vector<Matrix> alice_bases;
  std::vector<Matrix> bob_bases;
  std::vector<std::optional<Strategy>> restricted;  // empty for zero-weight blocks
  std::vector<BlockDiagnostics> diagnostics;
  double substate_overlap = 0.0;  // max |<psi_i|psi_j>|, i != j
  int alice_null_dim = 0;
  int bob_null_dim = 0;
};

/// Splits a strategy along answer partitions whose induced correlation is a
/// direct sum. Throws std::runtime_error naming the violated condition when
/// any residual exceeds tol.
BlockDecomposition strategy_block_decompose(const Strategy& s, const AnswerPartition& alice_partition,
                                            const AnswerPartition& bob_partition, double tol);

/// Restricts a strategy to a subset of questions on each side.
Strategy restrict_questions(const Strategy& s, const std::vector<int>& xs, const std::vector<int>& ys);

// ---------------------------------------------------------------------------
// Operator relations forced by Bob's question 4.

struct Y4Report {
  double a0_b4_answer0 = 0.0;   // |P_{A0}^0 psi - P_{B4}^0 psi|
  double a0_a2_answer0 = 0.0;   // |P_{A0}^0 psi - (P_{A2}^2 + P_{A2}^0) psi|
  double a0_b4_answer1 = 0.0;   // |P_{A0}^1 psi - P_{B4}^1 psi|
  double a0_a2_answer1 = 0.0;   // |P_{A0}^1 psi - P_{A2}^1 psi|
  double reconstruction = 0.0;  // |psi - sum_a P_{A0}^a (x) P_{B4}^a psi|
  bool passed = false;

  double max_residual() const;
};

Y4Report verify_y4_relations(const Strategy& s, double tol);

// ---------------------------------------------------------------------------
// Schmidt partition S = S0 u S1 and S2.

struct SchmidtPartition {
  SchmidtSpectrum all;  // S
  SchmidtSpectrum s0;   // from P_{A0}^0 (x) P_{B4}^0 psi
  SchmidtSpectrum s1;   // from P_{A0}^1 (x) P_{B4}^1 psi
  SchmidtSpectrum s2;   // from P_{A2}^2 (x) P_{B2}^2 psi
  MultisetMatch union_match;  // S vs S0 u S1
  bool s2_subset_of_s0 = false;
};

SchmidtPartition schmidt_partition(const Strategy& s, double tol, double zero_cutoff = kZeroCutoff);

/// The two alpha-correspondences between S0 and S1.
struct BijectionReport {
  MultisetMatch s1_vs_alpha_s0;
  MultisetMatch s0_minus_s2_vs_alpha_s1;
  double boundary_coefficient = 0.0;  // smallest element of S1, excluded from the second match
  bool s0_contains_s2 = false;
  bool passed = false;
};

BijectionReport schmidt_bijections(const SchmidtPartition& partition, double alpha, double tol);

// ---------------------------------------------------------------------------
// Descent chains lambda, alpha lambda, alpha^2 lambda, ...

struct DescentChain {
  double ratio = 0.0;
  double rel_tol = 0.0;
  std::vector<std::vector<int>> chains;  // indices into the spectrum
  int max_length = 0;
};

DescentChain descent_chain(const SchmidtSpectrum& spectrum, double ratio, double rel_tol);

// ---------------------------------------------------------------------------

struct SchmidtSumReport {
  bool orthogonal = false;  // both reduced-density products vanish
  double alice_product_norm = 0.0;
  double bob_product_norm = 0.0;
  bool multiset_identity = false;
  MultisetMatch match;  // Schmidt(psi) vs Schmidt(phi) u Schmidt(eta)
};

/// Checks the Schmidt-sum identity for psi = phi + eta. Throws if
/// |psi - phi - eta| > tol.
SchmidtSumReport schmidt_sum_check(const Vector& psi, const Vector& phi, const Vector& eta, int dA, int dB, double tol);

}  // namespace qsep::analysis
