#include "qsep/linalg.hpp"

#include <stdexcept>

namespace qsep {

Matrix pauli_z() {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

Matrix pauli_x() {
  Matrix x = Matrix::Zero(2, 2);
  x(0, 1) = 1.0;
  x(1, 0) = 1.0;
  return x;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix coefficient_matrix(const Vector& state, int dA, int dB) {
  if (state.size() != static_cast<Eigen::Index>(dA) * dB) {
    throw std::invalid_argument("state length " + std::to_string(state.size()) + " does not match dA*dB = " +
                                std::to_string(dA * dB));
  }
  Matrix coeffs(dA, dB);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) coeffs(i, j) = state(i * dB + j);
  }
  return coeffs;
}

Vector from_coefficient_matrix(const Matrix& coeffs) {
  const auto dA = coeffs.rows();
  const auto dB = coeffs.cols();
  Vector v(dA * dB);
  for (Eigen::Index i = 0; i < dA; ++i) {
    for (Eigen::Index j = 0; j < dB; ++j) v(i * dB + j) = coeffs(i, j);
  }
  return v;
}

Vector apply_local(const Matrix& alice_op, const Matrix& bob_op, const Vector& state, int dA, int dB) {
  // (P (x) Q) vec(C) corresponds to P C Q^T in the Alice-major layout.
  return from_coefficient_matrix(alice_op * coefficient_matrix(state, dA, dB) * bob_op.transpose());
}

Vector apply_alice(const Matrix& alice_op, const Vector& state, int dA, int dB) {
  return from_coefficient_matrix(alice_op * coefficient_matrix(state, dA, dB));
}

Vector apply_bob(const Matrix& bob_op, const Vector& state, int dA, int dB) {
  return from_coefficient_matrix(coefficient_matrix(state, dA, dB) * bob_op.transpose());
}

Matrix reduced_alice(const Vector& state, int dA, int dB) {
  const Matrix c = coefficient_matrix(state, dA, dB);
  return c * c.adjoint();
}

Matrix reduced_bob(const Vector& state, int dA, int dB) {
  const Matrix c = coefficient_matrix(state, dA, dB);
  return c.transpose() * c.conjugate();
}

Matrix projector_onto(const Vector& v) { return v * v.adjoint(); }

double frobenius(const Matrix& m) { return m.norm(); }

double hermiticity_residual(const Matrix& m) { return (m - m.adjoint()).norm(); }

double idempotence_residual(const Matrix& m) { return (m * m - m).norm(); }

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Vector haar_state(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

Matrix haar_unitary(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix column phases so the distribution is Haar rather than QR-biased.
  for (int j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace qsep
