#include "qsep/separating.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qsep/tilted_chsh.hpp"

namespace qsep::separating {

void TruncationSpec::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (blocks < 2) throw std::invalid_argument("truncation needs at least 2 blocks");
}

Matrix PairIsometry::pushforward(const Matrix& op, int dim) const {
  if (!fits(dim)) throw std::out_of_range("isometry image exceeds dimension");
  Matrix out = Matrix::Zero(dim, dim);
  out.block(first(), first(), 2, 2) = op;
  return out;
}

Matrix pushforward_sum(PairIsometry::Kind kind, const Matrix& op, int dim) {
  Matrix out = Matrix::Zero(dim, dim);
  for (PairIsometry v{kind, 0}; v.fits(dim); ++v.m) out.block(v.first(), v.first(), 2, 2) += op;
  return out;
}

namespace {

// Answer layout per question kind. Even questions: [V(O)]^+ -> 0,
// [V(O)]^- -> 1. Odd questions: [V(O)]^- -> 0, [V(O)]^+ -> 1, |0><0| -> 2.
Measurement paired_measurement(PairIsometry::Kind kind, const Matrix& observable, int dim, bool dangling_to_plus) {
  // (I +- O) / 2 for a 2x2 observable with spectrum {+1, -1}.
  const Matrix id = Matrix::Identity(2, 2);
  const Matrix plus = pushforward_sum(kind, 0.5 * (id + observable), dim);
  const Matrix minus = pushforward_sum(kind, 0.5 * (id - observable), dim);
  Matrix rest = Matrix::Identity(dim, dim);
  for (PairIsometry v{kind, 0}; v.fits(dim); ++v.m) rest(v.first(), v.first()) = rest(v.second(), v.second()) = 0.0;
  Measurement meas(kAnswers);
  if (kind == PairIsometry::Kind::kEven) {
    meas[0] = plus;
    meas[1] = minus;
    meas[2] = rest;
    return meas;
  }
  meas[0] = minus;
  meas[1] = plus;
  // For even dim the odd pairing leaves |dim-1> unpaired.
  const int last = dim - 1;
  if (dim % 2 == 0 && dangling_to_plus) {
    meas[1](last, last) += 1.0;
    rest(last, last) -= 1.0;
  }
  meas[2] = rest;
  return meas;
}

struct MeasurementSet {
  std::vector<Measurement> alice;
  std::vector<Measurement> bob;
};

MeasurementSet build_measurements(double alpha, int dim, bool dangling_to_plus) {
  const tilted_chsh::Params params = tilted_chsh::params_from_alpha(alpha);
  const Matrix z = pauli_z();
  const Matrix x = pauli_x();
  const Matrix tz = tilted_chsh::tilted_z(params.mu);
  const Matrix tx = tilted_chsh::tilted_x(params.mu);
  using K = PairIsometry::Kind;
  MeasurementSet set;
  set.alice = {paired_measurement(K::kEven, z, dim, dangling_to_plus),
               paired_measurement(K::kEven, x, dim, dangling_to_plus),
               paired_measurement(K::kOdd, z, dim, dangling_to_plus),
               paired_measurement(K::kOdd, x, dim, dangling_to_plus)};
  set.bob = {paired_measurement(K::kEven, tz, dim, dangling_to_plus),
             paired_measurement(K::kEven, tx, dim, dangling_to_plus),
             paired_measurement(K::kOdd, tz, dim, dangling_to_plus),
             paired_measurement(K::kOdd, tx, dim, dangling_to_plus), set.alice[0]};
  return set;
}

}  // namespace

Strategy ideal_truncated_strategy(const TruncationSpec& spec) {
  spec.validate();
  const int dim = spec.dimension();
  Strategy s;
  s.dA = dim;
  s.dB = dim;
  s.state = Vector::Zero(static_cast<Eigen::Index>(dim) * dim);
  const double a2 = spec.alpha * spec.alpha;
  const double norm = std::sqrt((1.0 - a2) / (1.0 - std::pow(spec.alpha, 2.0 * dim)));
  double coeff = norm;
  for (int i = 0; i < dim; ++i) {
    s.state(i * dim + i) = coeff;
    coeff *= spec.alpha;
  }
  MeasurementSet set = build_measurements(spec.alpha, dim, true);
  s.alice = std::move(set.alice);
  s.bob = std::move(set.bob);
  return s;
}

Correlation exact_pstar(double alpha, double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  // Every element is banded (|i - j| <= 1) and, away from index 0, invariant
  // under the shift i -> i + 2. With c_i = sqrt(1 - alpha^2) alpha^i the row
  // terms t(i) = sum_j c_i c_j P_ij Q_ij then satisfy t(i + 2) = alpha^4 t(i)
  // for i >= 1, so the series is t(0) + (t(1) + t(2)) / (1 - alpha^4).
  // Rows 0..2 only reach column 3, so a window of dimension 6 carries the
  // infinite structure exactly.
  constexpr int kWindow = 6;
  const MeasurementSet set = build_measurements(alpha, kWindow, false);
  const double a2 = alpha * alpha;
  const double a4 = a2 * a2;
  std::array<double, 4> c{};
  c[0] = std::sqrt(1.0 - a2);
  for (int i = 1; i < 4; ++i) c[i] = c[i - 1] * alpha;

  std::vector<double> table(static_cast<std::size_t>(kAliceQuestions) * kBobQuestions * kAnswers * kAnswers);
  for (int x = 0; x < kAliceQuestions; ++x) {
    for (int y = 0; y < kBobQuestions; ++y) {
      for (int a = 0; a < kAnswers; ++a) {
        for (int b = 0; b < kAnswers; ++b) {
          const Matrix& p = set.alice[x][a];
          const Matrix& q = set.bob[y][b];
          auto row = [&](int i) {
            double t = 0.0;
            for (int j = std::max(0, i - 1); j <= i + 1; ++j) t += c[i] * c[j] * (p(i, j) * q(i, j)).real();
            return t;
          };
          table[Correlation::flat_index(kBobQuestions, kAnswers, kAnswers, x, y, a, b)] =
              row(0) + (row(1) + row(2)) / (1.0 - a4);
        }
      }
    }
  }
  return Correlation(kAliceQuestions, kBobQuestions, kAnswers, kAnswers, std::move(table), tol);
}

bool is_printed_pair(int x, int y) {
  if (x >= 0 && x <= 1 && y >= 0 && y <= 1) return true;
  if (x >= 2 && x <= 3 && y >= 2 && y <= 3) return true;
  return (x == 0 || x == 2) && y == 4;
}

CorrelationTable printed_table(double alpha, int x, int y) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!is_printed_pair(x, y)) {
    throw std::invalid_argument("no printed table for question pair (" + std::to_string(x) + "," +
                                std::to_string(y) + ")");
  }
  const double a2 = alpha * alpha;
  const double a4 = a2 * a2;
  const double big_c = 1.0 / (1.0 - a2);
  CorrelationTable t{x, y, Eigen::MatrixXd::Zero(kAnswers, kAnswers)};
  if (y == 4) {
    t.entries(1, 1) = (1.0 / big_c) * a2 / (1.0 - a4);
    if (x == 0) {
      t.entries(0, 0) = (1.0 / big_c) / (1.0 - a4);
    } else {
      t.entries(0, 0) = (1.0 / big_c) * (1.0 / (1.0 - a4) - 1.0);
      t.entries(2, 0) = 1.0 / big_c;
    }
    return t;
  }
  const tilted_chsh::Params params = tilted_chsh::params_from_alpha(alpha);
  const Eigen::Matrix2d chsh = tilted_chsh::closed_form_table(params, x % 2, y % 2);
  if (x <= 1) {
    t.entries.topLeftCorner(2, 2) = chsh;
    return t;
  }
  const double w = (big_c - 1.0) / big_c;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) t.entries(a, b) = w * chsh(1 - a, 1 - b);
  }
  t.entries(2, 2) = 1.0 / big_c;
  return t;
}

double truncation_distance(double alpha, int blocks, Metric metric) {
  const TruncationSpec spec{alpha, blocks};
  spec.validate();
  return distance(exact_pstar(alpha), induce(ideal_truncated_strategy(spec)), metric);
}

std::vector<int> flip_labels() { return {1, 0, 2}; }

}  // namespace qsep::separating
