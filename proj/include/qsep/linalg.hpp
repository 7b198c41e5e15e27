#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

namespace qsep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

Matrix pauli_z();
Matrix pauli_x();

Matrix kron(const Matrix& a, const Matrix& b);

// Bipartite vectors use the Alice-major layout: component (i, j) lives at
// index i * dB + j. The coefficient matrix has shape dA x dB.
Matrix coefficient_matrix(const Vector& state, int dA, int dB);
Vector from_coefficient_matrix(const Matrix& coeffs);

// (P (x) Q) |state> without forming the Kronecker product.
Vector apply_local(const Matrix& alice_op, const Matrix& bob_op, const Vector& state, int dA, int dB);
Vector apply_alice(const Matrix& alice_op, const Vector& state, int dA, int dB);
Vector apply_bob(const Matrix& bob_op, const Vector& state, int dA, int dB);

// tr_B |v><v| and tr_A |v><v|.
Matrix reduced_alice(const Vector& state, int dA, int dB);
Matrix reduced_bob(const Vector& state, int dA, int dB);

Matrix projector_onto(const Vector& v);

double frobenius(const Matrix& m);
double hermiticity_residual(const Matrix& m);
double idempotence_residual(const Matrix& m);
double operator_norm(const Matrix& m);

Vector haar_state(int dim, Rng& rng);
Matrix haar_unitary(int dim, Rng& rng);

}  // namespace qsep
