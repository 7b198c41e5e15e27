#pragma once

#include <random>
#include <vector>

#include "qsep/linalg.hpp"
#include "qsep/strategy.hpp"

namespace fixture {

// Projective measurement from the columns of a Haar unitary, each column
// sent to a uniformly random answer.
inline qsep::Measurement random_measurement(int dim, int answers, qsep::Rng& rng) {
  const qsep::Matrix u = qsep::haar_unitary(dim, rng);
  std::uniform_int_distribution<int> pick(0, answers - 1);
  qsep::Measurement meas(answers, qsep::Matrix::Zero(dim, dim));
  for (int i = 0; i < dim; ++i) meas[pick(rng)] += u.col(i) * u.col(i).adjoint();
  return meas;
}

inline qsep::Strategy random_strategy(int dA, int dB, int m, int n, int r, int s, qsep::Rng& rng) {
  qsep::Strategy out;
  out.dA = dA;
  out.dB = dB;
  out.state = qsep::haar_state(dA * dB, rng);
  for (int x = 0; x < m; ++x) out.alice.push_back(random_measurement(dA, r, rng));
  for (int y = 0; y < n; ++y) out.bob.push_back(random_measurement(dB, s, rng));
  return out;
}

enum class Mutation { kScaledProjector, kDroppedElement, kDenormalizedState };

// Applies one corruption that a validator has to catch.
inline qsep::Strategy mutate(const qsep::Strategy& s, Mutation kind, qsep::Rng& rng) {
  qsep::Strategy out = s;
  auto& side = std::bernoulli_distribution(0.5)(rng) ? out.alice : out.bob;
  const int q = std::uniform_int_distribution<int>(0, static_cast<int>(side.size()) - 1)(rng);
  std::vector<int> nonzero;
  for (int a = 0; a < static_cast<int>(side[q].size()); ++a) {
    if (side[q][a].norm() > 0.5) nonzero.push_back(a);
  }
  const int a = nonzero[std::uniform_int_distribution<std::size_t>(0, nonzero.size() - 1)(rng)];
  switch (kind) {
    case Mutation::kScaledProjector:
      side[q][a] *= std::uniform_real_distribution<double>(1.001, 1.2)(rng);
      break;
    case Mutation::kDroppedElement:
      side[q].erase(side[q].begin() + a);
      break;
    case Mutation::kDenormalizedState:
      out.state *= std::uniform_real_distribution<double>(1.0 + 1e-6, 1.5)(rng);
      break;
  }
  return out;
}

}  // namespace fixture
