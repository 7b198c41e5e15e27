#include "qsep/tilted_chsh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qsep::tilted_chsh {

Params params_from_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 2.0)) throw std::invalid_argument("beta must lie in [0, 2]");
  Params p;
  p.beta = beta;
  const double sin2theta = std::sqrt((4.0 - beta * beta) / (4.0 + beta * beta));
  p.theta = 0.5 * std::asin(std::min(1.0, sin2theta));
  p.mu = std::atan(sin2theta);
  p.alpha = std::tan(p.theta);
  return p;
}

Params params_from_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  const double a2 = alpha * alpha;
  Params p;
  p.beta = 2.0 * (1.0 - a2) / std::sqrt(1.0 + 6.0 * a2 + a2 * a2);
  p.alpha = alpha;
  p.theta = std::atan(alpha);
  p.mu = std::atan(std::sin(2.0 * p.theta));
  const Params check = params_from_beta(std::min(2.0, std::max(0.0, p.beta)));
  if (std::abs(check.alpha - alpha) > 1e-10) {
    throw std::logic_error("alpha -> beta inversion failed its round trip");
  }
  return p;
}

Matrix tilted_z(double mu) { return std::cos(mu) * pauli_z() + std::sin(mu) * pauli_x(); }

Matrix tilted_x(double mu) { return std::cos(mu) * pauli_z() - std::sin(mu) * pauli_x(); }

namespace {

Measurement two_outcome(const Matrix& observable) {
  const Matrix id = Matrix::Identity(2, 2);
  return {0.5 * (id + observable), 0.5 * (id - observable)};
}

Matrix correlator_observable(const Measurement& meas) { return meas[0] - meas[1]; }

}  // namespace

Strategy ideal_strategy(const Params& p) {
  Strategy s;
  s.dA = 2;
  s.dB = 2;
  s.state = Vector::Zero(4);
  s.state(0) = std::cos(p.theta);
  s.state(3) = std::cos(p.theta) * p.alpha;
  s.state /= s.state.norm();
  s.alice = {two_outcome(pauli_z()), two_outcome(pauli_x())};
  s.bob = {two_outcome(tilted_z(p.mu)), two_outcome(tilted_x(p.mu))};
  return s;
}

double bell_value(const Strategy& s, double beta) {
  if (s.alice_questions() < 2 || s.bob_questions() < 2) throw std::invalid_argument("bell_value needs two questions");
  for (int q = 0; q < 2; ++q) {
    if (s.alice[q].size() < 2 || s.bob[q].size() < 2) throw std::invalid_argument("bell_value needs two answers");
  }
  const Matrix a0 = correlator_observable(s.alice[0]);
  const Matrix a1 = correlator_observable(s.alice[1]);
  const Matrix b0 = correlator_observable(s.bob[0]);
  const Matrix b1 = correlator_observable(s.bob[1]);
  const Matrix idB = Matrix::Identity(s.dB, s.dB);
  auto expect = [&](const Matrix& a, const Matrix& b) {
    return s.state.dot(apply_local(a, b, s.state, s.dA, s.dB)).real();
  };
  return beta * expect(a0, idB) + expect(a0, b0) + expect(a0, b1) + expect(a1, b0) - expect(a1, b1);
}

double quantum_bound(double beta) { return std::sqrt(8.0 + 2.0 * beta * beta); }

double product_bound(double beta) { return 2.0 + beta; }

CorrelationTable ideal_table(const Params& p, int x, int y) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw std::out_of_range("tilted CHSH questions are 0 and 1");
  return induce(ideal_strategy(p)).table(x, y);
}

Eigen::Matrix2d closed_form_table(const Params& p, int x, int y) {
  if (x < 0 || x > 1 || y < 0 || y > 1) throw std::out_of_range("tilted CHSH questions are 0 and 1");
  // State cos t |00> + sin t |11>: <ZI> = <IZ> = cos 2t, <ZZ> = 1, <XX> = sin 2t,
  // all mixed Z/X correlators vanish.
  const double c2 = std::cos(2.0 * p.theta);
  const double s2 = std::sin(2.0 * p.theta);
  const double cm = std::cos(p.mu);
  const double sm = std::sin(p.mu);
  const double sign = y == 0 ? 1.0 : -1.0;  // B1 flips the X component
  const double alice_mean = x == 0 ? c2 : 0.0;
  const double bob_mean = cm * c2;
  const double corr = x == 0 ? cm : sign * sm * s2;
  Eigen::Matrix2d t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double sa = a == 0 ? 1.0 : -1.0;
      const double sb = b == 0 ? 1.0 : -1.0;
      t(a, b) = 0.25 * (1.0 + sa * alice_mean + sb * bob_mean + sa * sb * corr);
    }
  }
  return t;
}

}  // namespace qsep::tilted_chsh
