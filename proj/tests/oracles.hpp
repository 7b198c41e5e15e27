#pragma once

// Test-side reference computations. None of these call into the library's
// construction code; they rebuild the objects from their definitions.

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using RealMatrix = Eigen::MatrixXd;

// <psi| P (x) Q |psi> with an explicitly formed Kronecker product.
inline double kron_expectation(const Eigen::VectorXcd& psi, const Eigen::MatrixXcd& p, const Eigen::MatrixXcd& q) {
  const int da = static_cast<int>(p.rows());
  const int db = static_cast<int>(q.rows());
  Eigen::MatrixXcd full(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      for (int k = 0; k < db; ++k) {
        for (int l = 0; l < db; ++l) full(i * db + k, j * db + l) = p(i, j) * q(k, l);
      }
    }
  }
  return (psi.adjoint() * full * psi)(0, 0).real();
}

// Real 2x2 eigenvectors of cos(phi) Z + sin(phi) X.
struct Pair {
  Eigen::Vector2d plus;
  Eigen::Vector2d minus;
};

inline Pair rotated(double phi) {
  return {Eigen::Vector2d(std::cos(phi / 2), std::sin(phi / 2)), Eigen::Vector2d(-std::sin(phi / 2), std::cos(phi / 2))};
}

// Three-outcome measurement on R^dim: `pair` on blocks (start + 2m, start + 2m + 1),
// plus eigenvectors to `plus_answer`, minus to `minus_answer`, the rest to answer 2.
inline std::vector<RealMatrix> block_measurement(int dim, int start, const Pair& pair, int plus_answer,
                                                 int minus_answer) {
  std::vector<RealMatrix> out(3, RealMatrix::Zero(dim, dim));
  std::vector<bool> covered(dim, false);
  for (int f = start; f + 1 < dim; f += 2) {
    Eigen::VectorXd vp = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd vm = Eigen::VectorXd::Zero(dim);
    vp(f) = pair.plus(0);
    vp(f + 1) = pair.plus(1);
    vm(f) = pair.minus(0);
    vm(f + 1) = pair.minus(1);
    out[plus_answer] += vp * vp.transpose();
    out[minus_answer] += vm * vm.transpose();
    covered[f] = covered[f + 1] = true;
  }
  for (int i = 0; i < dim; ++i) {
    if (!covered[i]) out[2](i, i) = 1.0;
  }
  return out;
}

struct SeriesStrategy {
  std::vector<std::vector<RealMatrix>> alice;
  std::vector<std::vector<RealMatrix>> bob;
  std::vector<double> coeff;
};

// The infinite strategy cut at an odd dimension far past double precision;
// coefficients are not renormalized.
inline SeriesStrategy series_strategy(double alpha, int dim = 81) {
  const double theta = std::atan(alpha);
  const double mu = std::atan(std::sin(2 * theta));
  const Pair z = rotated(0.0);
  const Pair x = rotated(M_PI / 2);
  const Pair bz = rotated(mu);
  const Pair bx = rotated(-mu);
  SeriesStrategy s;
  s.alice = {block_measurement(dim, 0, z, 0, 1), block_measurement(dim, 0, x, 0, 1),
             block_measurement(dim, 1, z, 1, 0), block_measurement(dim, 1, x, 1, 0)};
  s.bob = {block_measurement(dim, 0, bz, 0, 1), block_measurement(dim, 0, bx, 0, 1),
           block_measurement(dim, 1, bz, 1, 0), block_measurement(dim, 1, bx, 1, 0), s.alice[0]};
  s.coeff.resize(dim);
  for (int i = 0; i < dim; ++i) s.coeff[i] = std::sqrt(1 - alpha * alpha) * std::pow(alpha, i);
  return s;
}

// sum_ij c_i c_j P_ij Q_ij
inline double series_entry(const SeriesStrategy& s, int x, int y, int a, int b) {
  const RealMatrix& p = s.alice[x][a];
  const RealMatrix& q = s.bob[y][b];
  double total = 0.0;
  const int dim = static_cast<int>(s.coeff.size());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) total += s.coeff[i] * s.coeff[j] * p(i, j) * q(i, j);
  }
  return total;
}

// N (1, alpha, ..., alpha^{dim-1}) normalized.
inline std::vector<double> geometric_spectrum(double alpha, int dim) {
  std::vector<double> out(dim);
  double norm = 0.0;
  for (int i = 0; i < dim; ++i) {
    out[i] = std::pow(alpha, i);
    norm += out[i] * out[i];
  }
  for (double& v : out) v /= std::sqrt(norm);
  return out;
}

// Smallest l2 distance from `target` ([x][y][a][b] layout) to a deterministic
// local strategy, by exhaustive search.
inline double best_deterministic_l2(const std::vector<double>& target, int m, int n, int r, int s) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> fa(m, 0);
  for (;;) {
    std::vector<int> fb(n, 0);
    for (;;) {
      double total = 0.0;
      for (int x = 0; x < m; ++x) {
        for (int y = 0; y < n; ++y) {
          for (int a = 0; a < r; ++a) {
            for (int b = 0; b < s; ++b) {
              const double p = (a == fa[x] && b == fb[y]) ? 1.0 : 0.0;
              const double diff = p - target[((x * n + y) * r + a) * s + b];
              total += diff * diff;
            }
          }
        }
      }
      best = std::min(best, total);
      int k = 0;
      while (k < n && ++fb[k] == s) fb[k++] = 0;
      if (k == n) break;
    }
    int k = 0;
    while (k < m && ++fa[k] == r) fa[k++] = 0;
    if (k == m) break;
  }
  return std::sqrt(best);
}

}  // namespace oracle
