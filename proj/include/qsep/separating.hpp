#pragma once

#include "qsep/correlation.hpp"
#include "qsep/strategy.hpp"

namespace qsep::separating {

inline constexpr int kAliceQuestions = 4;
inline constexpr int kBobQuestions = 5;
inline constexpr int kAnswers = 3;

/// Finite cut of the ideal strategy: `blocks` = M, dimension D = 2M.
struct TruncationSpec {
  double alpha = 0.5;
  int blocks = 8;

  int dimension() const { return 2 * blocks; }
  void validate() const;
};

/// Isometry C^2 -> C^dim sending |0>,|1> to |2m>,|2m+1> (even) or
/// |2m+1>,|2m+2> (odd).
struct PairIsometry {
  enum class Kind { kEven, kOdd };
  Kind kind = Kind::kEven;
  int m = 0;

  int first() const { return kind == Kind::kEven ? 2 * m : 2 * m + 1; }
  int second() const { return first() + 1; }
  bool fits(int dim) const { return m >= 0 && second() < dim; }

  /// V O V^dagger as a dim x dim matrix.
  Matrix pushforward(const Matrix& op, int dim) const;
};

/// Sum of pushforwards over every block of the given kind that fits in dim.
Matrix pushforward_sum(PairIsometry::Kind kind, const Matrix& op, int dim);

/// The ideal strategy on C^D (x) C^D: 4 Alice questions, 5 Bob questions,
/// 3 answers each. The odd pairing leaves |D-1> unpaired; it is assigned to
/// answer 1 on questions 2 and 3 so every measurement stays complete.
Strategy ideal_truncated_strategy(const TruncationSpec& spec);

/// p* evaluated from the infinite-dimensional strategy by periodic summation.
/// `tol` bounds the per-table normalization error that is accepted.
Correlation exact_pstar(double alpha, double tol = 1e-12);

/// Whether (x, y) is one of the pairs with a printed closed form.
bool is_printed_pair(int x, int y);

/// Closed-form tables: x,y in {0,1}; x,y in {2,3}; (0,4); (2,4).
CorrelationTable printed_table(double alpha, int x, int y);

double truncation_distance(double alpha, int blocks, Metric metric);

/// Label swap 0 <-> 1 with answer 2 fixed.
std::vector<int> flip_labels();

}  // namespace qsep::separating
