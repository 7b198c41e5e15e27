#include "qsep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qsep::analysis {

namespace {

SchmidtDecomposition decompose(const Vector& vector, int dA, int dB, double zero_cutoff) {
  const Matrix coeffs = coefficient_matrix(vector, dA, dB);
  Eigen::JacobiSVD<Matrix> svd(coeffs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.spectrum.zero_cutoff = zero_cutoff;
  std::vector<int> kept;
  for (int i = 0; i < svd.singularValues().size(); ++i) {
    const double sv = svd.singularValues()(i);
    if (sv > zero_cutoff) {
      out.spectrum.coefficients.push_back(sv);
      kept.push_back(i);
    }
  }
  out.alice_basis.resize(dA, static_cast<Eigen::Index>(kept.size()));
  out.bob_basis.resize(dB, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.alice_basis.col(k) = svd.matrixU().col(kept[k]);
    // psi = sum_k s_k u_k (x) conj(v_k)
    out.bob_basis.col(k) = svd.matrixV().col(kept[k]).conjugate();
  }
  return out;
}

bool close(double lhs, double rhs, double rel_tol) {
  return std::abs(lhs - rhs) <= rel_tol * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

SchmidtDecomposition schmidt(const Vector& state, int dA, int dB, double zero_cutoff) {
  if (state.size() != static_cast<Eigen::Index>(dA) * dB) {
    throw std::invalid_argument("state length does not match dA*dB");
  }
  if (std::abs(state.norm() - 1.0) > 1e-10) throw std::invalid_argument("schmidt expects a unit vector");
  SchmidtDecomposition out = decompose(state, dA, dB, zero_cutoff);
  double kept = 0.0;
  for (double c : out.spectrum.coefficients) kept += c * c;
  const double floor = 1.0 - static_cast<double>(dA) * dB * zero_cutoff * zero_cutoff - 1e-12;
  if (kept < floor) throw std::runtime_error("zero cutoff discarded too much Schmidt weight");
  return out;
}

SchmidtSpectrum schmidt_coefficients(const Vector& vector, int dA, int dB, double zero_cutoff) {
  if (vector.size() != static_cast<Eigen::Index>(dA) * dB) {
    throw std::invalid_argument("vector length does not match dA*dB");
  }
  return decompose(vector, dA, dB, zero_cutoff).spectrum;
}

MultisetMatch match_multisets(std::vector<double> lhs, std::vector<double> rhs, double rel_tol) {
  std::sort(lhs.begin(), lhs.end(), std::greater<>());
  std::sort(rhs.begin(), rhs.end(), std::greater<>());
  MultisetMatch out;
  out.equal = lhs.size() == rhs.size();
  const std::size_t common = std::min(lhs.size(), rhs.size());
  for (std::size_t i = 0; i < common; ++i) {
    out.pairs.emplace_back(lhs[i], rhs[i]);
    out.max_abs_deviation = std::max(out.max_abs_deviation, std::abs(lhs[i] - rhs[i]));
    if (!close(lhs[i], rhs[i], rel_tol)) out.equal = false;
  }
  if (lhs.size() != rhs.size()) out.max_abs_deviation = std::numeric_limits<double>::infinity();
  return out;
}

std::optional<std::vector<double>> multiset_difference(const std::vector<double>& lhs, const std::vector<double>& rhs,
                                                       double rel_tol) {
  std::vector<double> rest = lhs;
  for (double value : rhs) {
    auto best = rest.end();
    for (auto it = rest.begin(); it != rest.end(); ++it) {
      if (close(*it, value, rel_tol) && (best == rest.end() || std::abs(*it - value) < std::abs(*best - value))) {
        best = it;
      }
    }
    if (best == rest.end()) return std::nullopt;
    rest.erase(best);
  }
  std::sort(rest.begin(), rest.end(), std::greater<>());
  return rest;
}

std::vector<double> scaled(const std::vector<double>& values, double factor) {
  std::vector<double> out(values);
  for (double& v : out) v *= factor;
  return out;
}

Strategy restrict_questions(const Strategy& s, const std::vector<int>& xs, const std::vector<int>& ys) {
  Strategy out;
  out.dA = s.dA;
  out.dB = s.dB;
  out.state = s.state;
  for (int x : xs) {
    if (x < 0 || x >= s.alice_questions()) throw std::invalid_argument("alice question out of range");
    out.alice.push_back(s.alice[x]);
  }
  for (int y : ys) {
    if (y < 0 || y >= s.bob_questions()) throw std::invalid_argument("bob question out of range");
    out.bob.push_back(s.bob[y]);
  }
  if (out.alice.empty() || out.bob.empty()) throw std::invalid_argument("restrict_questions needs nonempty subsets");
  return out;
}

namespace {

Matrix support_basis(const Matrix& density, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(density);
  const auto& values = eig.eigenvalues();
  const double largest = values.size() > 0 ? values.maxCoeff() : 0.0;
  // Eigenvalues at the rounding level of the largest one are numerically zero.
  const double threshold = std::max(cutoff, 64.0 * std::numeric_limits<double>::epsilon() * largest);
  std::vector<int> keep;
  for (int i = static_cast<int>(values.size()) - 1; i >= 0; --i) {
    if (values(i) > threshold) keep.push_back(i);
  }
  Matrix basis(density.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) basis.col(k) = eig.eigenvectors().col(keep[k]);
  return basis;
}

void require(double residual, double tol, const std::string& what, int block) {
  if (residual > tol) {
    std::ostringstream msg;
    msg << "block " << block << ": " << what << " residual " << residual << " exceeds " << tol;
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

BlockDecomposition strategy_block_decompose(const Strategy& s, const AnswerPartition& alice_partition,
                                            const AnswerPartition& bob_partition, double tol) {
  const Correlation p = induce(s);
  const BlockStructureReport structure = block_structure_check(p, alice_partition, bob_partition, tol);
  if (!structure.ok) {
    std::ostringstream msg;
    msg << "correlation is not a direct sum over the given partitions: " << structure.failure << " "
        << structure.offending_value;
    throw std::runtime_error(msg.str());
  }

  const int blocks = static_cast<int>(alice_partition.size());
  BlockDecomposition out;
  out.weights = structure.weights;
  int alice_used = 0;
  int bob_used = 0;
  for (int i = 0; i < blocks; ++i) {
    BlockDiagnostics diag;
    std::vector<Vector> alice_images;
    for (int x = 0; x < s.alice_questions(); ++x) {
      alice_images.push_back(projected_substate(s, Side::kAlice, x, alice_partition[i]));
    }
    std::vector<Vector> bob_images;
    for (int y = 0; y < s.bob_questions(); ++y) {
      bob_images.push_back(projected_substate(s, Side::kBob, y, bob_partition[i]));
    }
    for (const auto& v : alice_images) {
      diag.alice_question_dependence = std::max(diag.alice_question_dependence, (v - alice_images[0]).norm());
    }
    for (const auto& v : bob_images) {
      diag.bob_question_dependence = std::max(diag.bob_question_dependence, (v - bob_images[0]).norm());
    }
    diag.alice_bob_mismatch = (alice_images[0] - bob_images[0]).norm();
    const Vector psi_i = alice_images[0];
    diag.weight_mismatch = std::abs(psi_i.squaredNorm() - out.weights[i]);

    require(diag.alice_question_dependence, tol, "alice question dependence", i);
    require(diag.bob_question_dependence, tol, "bob question dependence", i);
    require(diag.alice_bob_mismatch, tol, "alice/bob projection mismatch", i);
    require(diag.weight_mismatch, tol, "block weight", i);

    out.substates.push_back(psi_i);
    if (!structure.blocks[i].has_value()) {
      out.alice_bases.emplace_back(s.dA, 0);
      out.bob_bases.emplace_back(s.dB, 0);
      out.restricted.emplace_back(std::nullopt);
      out.diagnostics.push_back(diag);
      continue;
    }

    const double cutoff = tol * tol;
    const Matrix ua = support_basis(reduced_alice(psi_i, s.dA, s.dB), cutoff);
    const Matrix ub = support_basis(reduced_bob(psi_i, s.dA, s.dB), cutoff);
    alice_used += static_cast<int>(ua.cols());
    bob_used += static_cast<int>(ub.cols());

    Strategy block;
    block.dA = static_cast<int>(ua.cols());
    block.dB = static_cast<int>(ub.cols());
    const Matrix local = ua.adjoint() * coefficient_matrix(psi_i, s.dA, s.dB) * ub.conjugate();
    block.state = from_coefficient_matrix(local);
    block.state /= block.state.norm();

    auto restrict_side = [&](const std::vector<Measurement>& measurements, const std::vector<int>& answers,
                             const Matrix& basis, std::vector<Measurement>& target) {
      const Matrix id = Matrix::Identity(basis.cols(), basis.cols());
      for (const auto& meas : measurements) {
        Measurement restricted;
        Matrix total = Matrix::Zero(basis.cols(), basis.cols());
        for (int a : answers) {
          Matrix r = basis.adjoint() * meas[a] * basis;
          diag.idempotence = std::max(diag.idempotence, idempotence_residual(r));
          total += r;
          restricted.push_back(std::move(r));
        }
        diag.restricted_completeness = std::max(diag.restricted_completeness, (total - id).norm());
        target.push_back(std::move(restricted));
      }
    };
    restrict_side(s.alice, alice_partition[i], ua, block.alice);
    restrict_side(s.bob, bob_partition[i], ub, block.bob);

    const Correlation& expected = *structure.blocks[i];
    const std::vector<double> induced = expectation_table(block);
    for (int x = 0; x < expected.m(); ++x) {
      for (int y = 0; y < expected.n(); ++y) {
        double tv = 0.0;
        for (int a = 0; a < expected.r(); ++a) {
          for (int b = 0; b < expected.s(); ++b) {
            tv += std::abs(induced[Correlation::flat_index(expected.n(), expected.r(), expected.s(), x, y, a, b)] -
                           expected(x, y, a, b));
          }
        }
        diag.induced_mismatch = std::max(diag.induced_mismatch, 0.5 * tv);
      }
    }
    require(diag.idempotence, tol, "restricted idempotence", i);
    require(diag.restricted_completeness, tol, "restricted completeness", i);
    require(diag.induced_mismatch, tol, "induced sub-correlation", i);

    out.alice_bases.push_back(ua);
    out.bob_bases.push_back(ub);
    out.restricted.emplace_back(std::move(block));
    out.diagnostics.push_back(diag);
  }
  for (int i = 0; i < blocks; ++i) {
    for (int j = i + 1; j < blocks; ++j) {
      out.substate_overlap = std::max(out.substate_overlap, std::abs(out.substates[i].dot(out.substates[j])));
    }
  }
  require(out.substate_overlap, tol, "sub-state orthogonality", -1);
  out.alice_null_dim = s.dA - alice_used;
  out.bob_null_dim = s.dB - bob_used;
  return out;
}

double Y4Report::max_residual() const {
  return std::max({a0_b4_answer0, a0_a2_answer0, a0_b4_answer1, a0_a2_answer1, reconstruction});
}

namespace {

void require_pstar_shape(const Strategy& s) {
  if (s.alice_questions() != 4 || s.bob_questions() != 5 || s.alice_answers() != 3 || s.bob_answers() != 3) {
    throw std::invalid_argument("expected 4 alice questions, 5 bob questions and 3 answers each");
  }
}

}  // namespace

Y4Report verify_y4_relations(const Strategy& s, double tol) {
  require_pstar_shape(s);
  const int dA = s.dA;
  const int dB = s.dB;
  const Vector& psi = s.state;
  const Vector a0_0 = apply_alice(s.alice[0][0], psi, dA, dB);
  const Vector a0_1 = apply_alice(s.alice[0][1], psi, dA, dB);
  const Vector b4_0 = apply_bob(s.bob[4][0], psi, dA, dB);
  const Vector b4_1 = apply_bob(s.bob[4][1], psi, dA, dB);
  const Vector a2_02 = apply_alice(s.alice[2][0] + s.alice[2][2], psi, dA, dB);
  const Vector a2_1 = apply_alice(s.alice[2][1], psi, dA, dB);
  const Vector split = apply_local(s.alice[0][0], s.bob[4][0], psi, dA, dB) +
                       apply_local(s.alice[0][1], s.bob[4][1], psi, dA, dB);
  Y4Report report;
  report.a0_b4_answer0 = (a0_0 - b4_0).norm();
  report.a0_a2_answer0 = (a0_0 - a2_02).norm();
  report.a0_b4_answer1 = (a0_1 - b4_1).norm();
  report.a0_a2_answer1 = (a0_1 - a2_1).norm();
  report.reconstruction = (psi - split).norm();
  report.passed = report.max_residual() <= tol;
  return report;
}

SchmidtPartition schmidt_partition(const Strategy& s, double tol, double zero_cutoff) {
  const Y4Report y4 = verify_y4_relations(s, tol);
  if (!y4.passed) {
    std::ostringstream msg;
    msg << "y=4 relations fail: max residual " << y4.max_residual();
    throw std::runtime_error(msg.str());
  }
  const int dA = s.dA;
  const int dB = s.dB;
  SchmidtPartition out;
  out.all = schmidt(s.state, dA, dB, zero_cutoff).spectrum;
  out.s0 = schmidt_coefficients(apply_local(s.alice[0][0], s.bob[4][0], s.state, dA, dB), dA, dB, zero_cutoff);
  out.s1 = schmidt_coefficients(apply_local(s.alice[0][1], s.bob[4][1], s.state, dA, dB), dA, dB, zero_cutoff);
  out.s2 = schmidt_coefficients(apply_local(s.alice[2][2], s.bob[2][2], s.state, dA, dB), dA, dB, zero_cutoff);

  std::vector<double> joined = out.s0.coefficients;
  joined.insert(joined.end(), out.s1.coefficients.begin(), out.s1.coefficients.end());
  out.union_match = match_multisets(out.all.coefficients, joined, tol);
  if (!out.union_match.equal) {
    std::ostringstream msg;
    msg << "Schmidt(psi) differs from Schmidt(S0) u Schmidt(S1): max deviation " << out.union_match.max_abs_deviation;
    throw std::runtime_error(msg.str());
  }
  out.s2_subset_of_s0 = multiset_difference(out.s0.coefficients, out.s2.coefficients, tol).has_value();
  return out;
}

BijectionReport schmidt_bijections(const SchmidtPartition& partition, double alpha, double tol) {
  BijectionReport out;
  out.s1_vs_alpha_s0 = match_multisets(partition.s1.coefficients, scaled(partition.s0.coefficients, alpha), tol);

  const auto s0_minus_s2 = multiset_difference(partition.s0.coefficients, partition.s2.coefficients, tol);
  out.s0_contains_s2 = s0_minus_s2.has_value();
  std::vector<double> s1 = partition.s1.coefficients;
  std::sort(s1.begin(), s1.end(), std::greater<>());
  if (!s1.empty()) {
    out.boundary_coefficient = s1.back();
    s1.pop_back();
  }
  if (s0_minus_s2) out.s0_minus_s2_vs_alpha_s1 = match_multisets(*s0_minus_s2, scaled(s1, alpha), tol);
  out.passed = out.s1_vs_alpha_s0.equal && out.s0_contains_s2 && out.s0_minus_s2_vs_alpha_s1.equal;
  return out;
}

DescentChain descent_chain(const SchmidtSpectrum& spectrum, double ratio, double rel_tol) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("chain ratio must lie in (0, 1)");
  if (!(rel_tol >= 0.0 && rel_tol < (1.0 - ratio) / 2.0)) {
    throw std::invalid_argument("rel_tol must be below (1 - ratio) / 2");
  }
  const auto& lambda = spectrum.coefficients;
  const int n = static_cast<int>(lambda.size());
  DescentChain out;
  out.ratio = ratio;
  out.rel_tol = rel_tol;
  std::vector<bool> used(n, false);
  const double lo = ratio * (1.0 - rel_tol);
  const double hi = ratio * (1.0 + rel_tol);
  for (int start = 0; start < n; ++start) {
    if (used[start]) continue;
    std::vector<int> chain{start};
    used[start] = true;
    int current = start;
    for (;;) {
      int next = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int j = current + 1; j < n; ++j) {
        if (used[j]) continue;
        const double q = lambda[j] / lambda[current];
        if (q >= lo && q <= hi && std::abs(q - ratio) < best) {
          best = std::abs(q - ratio);
          next = j;
        }
      }
      if (next < 0) break;
      used[next] = true;
      chain.push_back(next);
      current = next;
    }
    out.max_length = std::max(out.max_length, static_cast<int>(chain.size()));
    out.chains.push_back(std::move(chain));
  }
  return out;
}

SchmidtSumReport schmidt_sum_check(const Vector& psi, const Vector& phi, const Vector& eta, int dA, int dB,
                                   double tol) {
  const double split = (psi - phi - eta).norm();
  if (split > tol) {
    std::ostringstream msg;
    msg << "psi != phi + eta: residual " << split;
    throw std::invalid_argument(msg.str());
  }
  SchmidtSumReport out;
  out.alice_product_norm = operator_norm(reduced_alice(phi, dA, dB) * reduced_alice(eta, dA, dB));
  out.bob_product_norm = operator_norm(reduced_bob(phi, dA, dB) * reduced_bob(eta, dA, dB));
  out.orthogonal = out.alice_product_norm <= tol && out.bob_product_norm <= tol;
  if (!out.orthogonal) return out;
  std::vector<double> joined = schmidt_coefficients(phi, dA, dB).coefficients;
  const auto eta_coeffs = schmidt_coefficients(eta, dA, dB).coefficients;
  joined.insert(joined.end(), eta_coeffs.begin(), eta_coeffs.end());
  out.match = match_multisets(schmidt_coefficients(psi, dA, dB).coefficients, joined, tol);
  out.multiset_identity = out.match.equal;
  return out;
}

}  // namespace qsep::analysis
