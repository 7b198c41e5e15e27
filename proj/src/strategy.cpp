#include "qsep/strategy.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsep {

std::string side_name(Side side) { return side == Side::kAlice ? "alice" : "bob"; }

std::string ValidationReport::summary() const {
  if (issues.empty()) return "valid";
  std::ostringstream out;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i > 0) out << "; ";
    out << issues[i].message;
  }
  return out.str();
}

namespace {

void check_side(const std::vector<Measurement>& measurements, int dim, Side side, ValidationReport& report) {
  const Matrix identity = Matrix::Identity(dim, dim);
  const std::size_t answers = measurements.empty() ? 0 : measurements.front().size();
  auto add = [&](std::string kind, int q, int a, int b, double residual, const std::string& what) {
    std::ostringstream msg;
    msg << side_name(side) << " question " << q;
    if (a >= 0) msg << " answer " << a;
    if (b >= 0) msg << "/" << b;
    msg << ": " << what << " residual " << residual;
    report.issues.push_back({std::move(kind), side, q, a, b, residual, msg.str()});
  };

  for (int q = 0; q < static_cast<int>(measurements.size()); ++q) {
    const Measurement& meas = measurements[q];
    if (meas.size() != answers) {
      add("shape", q, -1, -1, std::abs(static_cast<double>(meas.size()) - static_cast<double>(answers)),
          "answer count differs from question 0");
    }
    bool shapes_ok = true;
    for (int a = 0; a < static_cast<int>(meas.size()); ++a) {
      if (meas[a].rows() != dim || meas[a].cols() != dim) {
        add("shape", q, a, -1, 1.0, "element is not " + std::to_string(dim) + "x" + std::to_string(dim));
        shapes_ok = false;
      }
    }
    if (!shapes_ok) continue;

    Matrix total = Matrix::Zero(dim, dim);
    for (int a = 0; a < static_cast<int>(meas.size()); ++a) {
      const Matrix& p = meas[a];
      total += p;
      const double herm = hermiticity_residual(p);
      if (herm > kProjectorTol) add("hermiticity", q, a, -1, herm, "hermiticity");
      const double idem = idempotence_residual(p);
      if (idem > kProjectorTol) add("idempotence", q, a, -1, idem, "idempotence");
      for (int b = a + 1; b < static_cast<int>(meas.size()); ++b) {
        const double orth = (p * meas[b]).norm();
        if (orth > kProjectorTol) add("orthogonality", q, a, b, orth, "orthogonality");
      }
    }
    const double comp = (total - identity).norm();
    if (comp > kProjectorTol) add("completeness", q, -1, -1, comp, "completeness");
  }
}

}  // namespace

ValidationReport validate(const Strategy& s) {
  ValidationReport report;
  if (s.dA < 1 || s.dB < 1 || s.state.size() != static_cast<Eigen::Index>(s.dA) * s.dB) {
    std::ostringstream msg;
    msg << "state length " << s.state.size() << " does not match dA*dB = " << s.dA * s.dB;
    report.issues.push_back({"shape", Side::kAlice, -1, -1, -1, 1.0, msg.str()});
    return report;
  }
  const double norm_dev = std::abs(s.state.norm() - 1.0);
  if (norm_dev > kStateNormTol) {
    std::ostringstream msg;
    msg << "state norm deviates from 1 by " << norm_dev;
    report.issues.push_back({"state_norm", Side::kAlice, -1, -1, -1, norm_dev, msg.str()});
  }
  if (s.alice.empty() || s.bob.empty()) {
    report.issues.push_back({"shape", Side::kAlice, -1, -1, -1, 1.0, "strategy needs at least one question per side"});
  }
  check_side(s.alice, s.dA, Side::kAlice, report);
  check_side(s.bob, s.dB, Side::kBob, report);
  return report;
}

std::vector<double> expectation_table(const Strategy& s) {
  const int m = s.alice_questions();
  const int n = s.bob_questions();
  const int r = s.alice_answers();
  const int sb = s.bob_answers();
  const Matrix psi = coefficient_matrix(s.state, s.dA, s.dB);
  std::vector<double> table(static_cast<std::size_t>(m) * n * r * sb);
  for (int x = 0; x < m; ++x) {
    for (int a = 0; a < r; ++a) {
      // <psi|P (x) Q|psi> = sum_ij (Psi^dag P Psi)_ij Q_ij
      const Matrix left = psi.adjoint() * s.alice[x][a] * psi;
      for (int y = 0; y < n; ++y) {
        for (int b = 0; b < sb; ++b) {
          table[Correlation::flat_index(n, r, sb, x, y, a, b)] = left.cwiseProduct(s.bob[y][b]).sum().real();
        }
      }
    }
  }
  return table;
}

Correlation induce(const Strategy& s) {
  const ValidationReport report = validate(s);
  if (!report.ok()) throw std::invalid_argument("invalid strategy: " + report.summary());

  const Matrix psi = coefficient_matrix(s.state, s.dA, s.dB);
  for (int x = 0; x < s.alice_questions(); ++x) {
    for (int a = 0; a < s.alice_answers(); ++a) {
      const Matrix left = psi.adjoint() * s.alice[x][a] * psi;
      for (int y = 0; y < s.bob_questions(); ++y) {
        for (int b = 0; b < s.bob_answers(); ++b) {
          const double imag = left.cwiseProduct(s.bob[y][b]).sum().imag();
          if (std::abs(imag) > kProjectorTol) {
            throw std::runtime_error("induced probability has imaginary part " + std::to_string(imag));
          }
        }
      }
    }
  }
  return Correlation(s.alice_questions(), s.bob_questions(), s.alice_answers(), s.bob_answers(),
                     expectation_table(s), kProjectorTol);
}

Observable::Observable(Matrix matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("observable must be square");
  if (hermiticity_residual(matrix_) > kObservableTol) throw std::invalid_argument("observable is not Hermitian");
  const double cube = (matrix_ * matrix_ * matrix_ - matrix_).norm();
  if (cube > kObservableTol) {
    throw std::invalid_argument("observable spectrum not contained in {-1,0,1}: |M^3 - M| = " + std::to_string(cube));
  }
}

Measurement observable_to_projectors(const Observable& o, AnswerRouting routing, int num_answers) {
  const int d = o.dim();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(o.matrix());
  Matrix plus = Matrix::Zero(d, d);
  Matrix minus = Matrix::Zero(d, d);
  Matrix kernel = Matrix::Zero(d, d);
  int n_plus = 0, n_minus = 0, n_kernel = 0;
  for (int i = 0; i < d; ++i) {
    const double lambda = eig.eigenvalues()(i);
    const Vector v = eig.eigenvectors().col(i);
    if (std::abs(lambda - 1.0) <= kEigenClusterTol) {
      plus += projector_onto(v);
      ++n_plus;
    } else if (std::abs(lambda + 1.0) <= kEigenClusterTol) {
      minus += projector_onto(v);
      ++n_minus;
    } else if (std::abs(lambda) <= kEigenClusterTol) {
      kernel += projector_onto(v);
      ++n_kernel;
    } else {
      throw std::invalid_argument("observable eigenvalue " + std::to_string(lambda) + " outside {-1,0,1}");
    }
  }
  // Only eigenspaces that occur need a valid answer.
  for (auto [idx, count] : {std::pair{routing.plus, n_plus}, {routing.minus, n_minus}, {routing.kernel, n_kernel}}) {
    if (count > 0 && (idx < 0 || idx >= num_answers)) throw std::invalid_argument("answer routing index out of range");
  }
  auto clash = [](int i, int ni, int j, int nj) { return i == j && ni > 0 && nj > 0; };
  if (clash(routing.plus, n_plus, routing.minus, n_minus) || clash(routing.plus, n_plus, routing.kernel, n_kernel) ||
      clash(routing.minus, n_minus, routing.kernel, n_kernel)) {
    throw std::invalid_argument("two nonzero eigenspaces routed to the same answer");
  }
  Measurement out(num_answers, Matrix::Zero(d, d));
  if (n_plus > 0) out[routing.plus] = plus;
  if (n_minus > 0) out[routing.minus] = minus;
  if (n_kernel > 0) out[routing.kernel] = kernel;
  return out;
}

Vector projected_substate(const Strategy& s, Side side, int question, std::span<const int> answers) {
  const auto& measurements = side == Side::kAlice ? s.alice : s.bob;
  const int dim = side == Side::kAlice ? s.dA : s.dB;
  if (question < 0 || question >= static_cast<int>(measurements.size())) {
    throw std::out_of_range("question " + std::to_string(question) + " out of range");
  }
  const Measurement& meas = measurements[question];
  Matrix total = Matrix::Zero(dim, dim);
  for (int a : answers) {
    if (a < 0 || a >= static_cast<int>(meas.size())) throw std::out_of_range("answer out of range");
    total += meas[a];
  }
  return side == Side::kAlice ? apply_alice(total, s.state, s.dA, s.dB) : apply_bob(total, s.state, s.dA, s.dB);
}

namespace {

std::vector<Measurement> embed_side(std::span<const WeightedStrategy> blocks, bool alice, int total_dim,
                                    int total_answers) {
  const auto& first = alice ? blocks.front().block.alice : blocks.front().block.bob;
  const int questions = static_cast<int>(first.size());
  std::vector<Measurement> out(questions, Measurement(total_answers, Matrix::Zero(total_dim, total_dim)));
  int dim_off = 0;
  int ans_off = 0;
  for (const auto& wb : blocks) {
    const auto& meas = alice ? wb.block.alice : wb.block.bob;
    const int d = alice ? wb.block.dA : wb.block.dB;
    const int answers = alice ? wb.block.alice_answers() : wb.block.bob_answers();
    if (static_cast<int>(meas.size()) != questions) {
      throw std::invalid_argument("direct_sum strategies have mismatched question counts");
    }
    for (int q = 0; q < questions; ++q) {
      for (int a = 0; a < answers; ++a) out[q][ans_off + a].block(dim_off, dim_off, d, d) = meas[q][a];
    }
    dim_off += d;
    ans_off += answers;
  }
  return out;
}

}  // namespace

Strategy direct_sum(std::span<const WeightedStrategy> blocks) {
  if (blocks.empty()) throw std::invalid_argument("direct_sum needs at least one block");
  int dA = 0, dB = 0, r = 0, sb = 0;
  double total = 0.0;
  for (const auto& wb : blocks) {
    if (wb.weight < 0.0) throw std::invalid_argument("direct_sum weight is negative");
    dA += wb.block.dA;
    dB += wb.block.dB;
    r += wb.block.alice_answers();
    sb += wb.block.bob_answers();
    total += wb.weight;
  }
  if (std::abs(total - 1.0) > kNormalizationTol) throw std::invalid_argument("direct_sum weights do not sum to 1");

  Strategy out;
  out.dA = dA;
  out.dB = dB;
  Matrix coeffs = Matrix::Zero(dA, dB);
  int a_off = 0, b_off = 0;
  for (const auto& wb : blocks) {
    coeffs.block(a_off, b_off, wb.block.dA, wb.block.dB) =
        std::sqrt(wb.weight) * coefficient_matrix(wb.block.state, wb.block.dA, wb.block.dB);
    a_off += wb.block.dA;
    b_off += wb.block.dB;
  }
  out.state = from_coefficient_matrix(coeffs);
  out.alice = embed_side(blocks, true, dA, r);
  out.bob = embed_side(blocks, false, dB, sb);
  return out;
}

Strategy pad_alice_ancilla(const Strategy& s, int ancilla_dim) {
  if (ancilla_dim < 1) throw std::invalid_argument("ancilla dimension must be positive");
  Strategy out = s;
  out.dA = s.dA * ancilla_dim;
  Vector zero = Vector::Zero(ancilla_dim);
  zero(0) = 1.0;
  const Matrix coeffs = coefficient_matrix(s.state, s.dA, s.dB);
  // Alice index a * k + j.
  Matrix padded = Matrix::Zero(out.dA, s.dB);
  for (int a = 0; a < s.dA; ++a) padded.row(a * ancilla_dim) = coeffs.row(a);
  out.state = from_coefficient_matrix(padded);
  const Matrix id = Matrix::Identity(ancilla_dim, ancilla_dim);
  for (auto& meas : out.alice) {
    for (auto& p : meas) p = kron(p, id);
  }
  return out;
}

Strategy apply_local_unitaries(const Strategy& s, const Matrix& u_alice, const Matrix& u_bob) {
  Strategy out = s;
  out.state = apply_local(u_alice, u_bob, s.state, s.dA, s.dB);
  for (auto& meas : out.alice) {
    for (auto& p : meas) p = u_alice * p * u_alice.adjoint();
  }
  for (auto& meas : out.bob) {
    for (auto& p : meas) p = u_bob * p * u_bob.adjoint();
  }
  return out;
}

}  // namespace qsep
