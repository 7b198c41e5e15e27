#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qsep {

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kClampTol = 1e-14;

/// Probability table p(a,b|x,y) for one question pair, shape r x s.
struct CorrelationTable {
  int x = 0;
  int y = 0;
  Eigen::MatrixXd entries;
};

/// A bipartite correlation p(a,b|x,y) over finite question and answer sets.
///
/// Immutable after construction. Construction clamps entries in
/// [-kClampTol, 0) to zero and rejects tables that are negative beyond that
/// or whose per-question-pair sums deviate from 1 by more than the
/// normalization tolerance.
class Correlation {
 public:
  /// `table` is laid out row-major over [x][y][a][b].
  Correlation(int m, int n, int r, int s, std::vector<double> table, double normalization_tol = kNormalizationTol);

  int m() const { return m_; }
  int n() const { return n_; }
  int r() const { return r_; }
  int s() const { return s_; }

  double operator()(int x, int y, int a, int b) const { return table_[index(x, y, a, b)]; }
  CorrelationTable table(int x, int y) const;
  const std::vector<double>& raw() const { return table_; }

  bool same_shape(const Correlation& other) const {
    return m_ == other.m_ && n_ == other.n_ && r_ == other.r_ && s_ == other.s_;
  }

  static std::size_t flat_index(int n, int r, int s, int x, int y, int a, int b) {
    return ((static_cast<std::size_t>(x) * n + y) * r + a) * s + b;
  }

 private:
  std::size_t index(int x, int y, int a, int b) const { return flat_index(n_, r_, s_, x, y, a, b); }

  int m_;
  int n_;
  int r_;
  int s_;
  std::vector<double> table_;
};

using AnswerPartition = std::vector<std::vector<int>>;

struct BlockSpec {
  AnswerPartition alice_partition;
  AnswerPartition bob_partition;
  std::vector<double> weights;  // empty when only the partitions are known
};

struct WeightedCorrelation {
  double weight;
  Correlation block;
};

/// Direct sum: block i occupies a contiguous answer range, in declaration
/// order, and p(a,b|x,y) = delta_ij w_i p_i(a,b|x,y).
Correlation direct_sum(std::span<const WeightedCorrelation> blocks);

/// Answer-label permutation: new label perm[a] for old label a.
Correlation permute_answers(const Correlation& p, const std::vector<int>& alice_perm, const std::vector<int>& bob_perm);

struct BlockStructureReport {
  bool ok = false;
  std::vector<double> weights;
  std::vector<std::optional<Correlation>> blocks;  // normalized p_i; empty where the weight is below tol
  // Failure details.
  std::string failure;
  double offending_value = 0.0;
  int x = -1, y = -1, a = -1, b = -1;
};

BlockStructureReport block_structure_check(const Correlation& p, const AnswerPartition& alice_partition,
                                           const AnswerPartition& bob_partition, double tol);

Correlation restrict(const Correlation& p, const std::vector<int>& xs, const std::vector<int>& ys);

enum class Metric { kMaxTv, kL2 };

Metric parse_metric(const std::string& name);
std::string metric_name(Metric metric);

double distance(const Correlation& p, const Correlation& q, Metric metric);

void validate_partition(const AnswerPartition& partition, int answers, const char* side);

}  // namespace qsep
