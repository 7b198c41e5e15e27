#pragma once

#include "qsep/correlation.hpp"
#include "qsep/strategy.hpp"

namespace qsep::tilted_chsh {

/// Parameters of the ideal tilted CHSH strategy. Angles in radians.
/// sin 2theta = sqrt((4 - beta^2) / (4 + beta^2)), mu = atan(sin 2theta),
/// alpha = tan theta.
struct Params {
  double beta = 0.0;
  double theta = 0.0;
  double mu = 0.0;
  double alpha = 0.0;
};

Params params_from_beta(double beta);

/// Inverse map, beta = 2 (1 - alpha^2) / sqrt(1 + 6 alpha^2 + alpha^4).
/// Throws std::logic_error if the round trip through params_from_beta does
/// not reproduce alpha within 1e-10.
Params params_from_alpha(double alpha);

/// The alpha-tilted Paulis cos(mu) Z + sin(mu) X and cos(mu) Z - sin(mu) X.
Matrix tilted_z(double mu);
Matrix tilted_x(double mu);

/// Two-qubit strategy with state cos(theta)(|00> + alpha|11>); +1 eigenspace
/// is answer 0 and -1 eigenspace answer 1.
Strategy ideal_strategy(const Params& p);

/// <psi| beta A0 + A0 B0 + A0 B1 + A1 B0 - A1 B1 |psi> with A = P^0 - P^1.
double bell_value(const Strategy& s, double beta);

/// The quantum maximum sqrt(8 + 2 beta^2).
double quantum_bound(double beta);
/// The product-state bound 2 + beta.
double product_bound(double beta);

CorrelationTable ideal_table(const Params& p, int x, int y);

/// Closed form of the same tables from the correlator expectations of the
/// ideal state; independent of the operator route in ideal_table.
Eigen::Matrix2d closed_form_table(const Params& p, int x, int y);

}  // namespace qsep::tilted_chsh
