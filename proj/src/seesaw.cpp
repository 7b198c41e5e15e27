#include "qsep/seesaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "qsep/separating.hpp"

namespace qsep::seesaw {

namespace {

using Povms = std::vector<std::vector<Matrix>>;

// Below this the squared distance is treated as exactly reached.
constexpr double kZeroObjective = 1e-26;
constexpr double kTinyDenominator = 1e-300;
constexpr double kSameAtom = 1e-12;

struct Problem {
  int m, n, r, s, d;
  const std::vector<double>* target;

  double t(int x, int y, int a, int b) const { return (*target)[Correlation::flat_index(n, r, s, x, y, a, b)]; }
  std::size_t idx(int x, int y, int a, int b) const { return Correlation::flat_index(n, r, s, x, y, a, b); }
};

// Operators on C^d (x) C^d are handled in realigned form
//   R[(i,j),(k,l)] = rho[(i,k),(j,l)],
// so tr(rho (A (x) B)) = sum R[(i,j),(k,l)] A[j,i] B[l,k] is a bilinear form
// and every probability, marginal and gradient is one matrix product.
Matrix realign(const Matrix& m, int d) {
  Matrix out(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) out(i * d + j, k * d + l) = m(i * d + k, j * d + l);
      }
    }
  }
  return out;
}

Matrix unrealign(const Matrix& m, int d) {
  Matrix out(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) out(i * d + k, j * d + l) = m(i * d + j, k * d + l);
      }
    }
  }
  return out;
}

// Row (x, a) holds E_x^a flattened, (i, j) -> i d + j; `transposed` stores E^T.
Matrix stack(const Povms& ops, int d, bool transposed) {
  const int per = static_cast<int>(ops[0].size());
  Matrix out(static_cast<Eigen::Index>(ops.size()) * per, d * d);
  for (std::size_t q = 0; q < ops.size(); ++q) {
    for (int e = 0; e < per; ++e) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out(q * per + e, i * d + j) = transposed ? ops[q][e](j, i) : ops[q][e](i, j);
      }
    }
  }
  return out;
}

Matrix unflatten(const Eigen::Ref<const Vector>& v, int d) {
  Matrix out(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out(i, j) = v(i * d + j);
  }
  return out;
}

// Rows (x, a), columns (y, b).
RealMatrix table_matrix(const Matrix& rho, const Matrix& alice_t, const Matrix& bob_t, int d) {
  return (alice_t * realign(rho, d) * bob_t.transpose()).real();
}

std::vector<double> flatten_table(const RealMatrix& t, const Problem& pb) {
  std::vector<double> out(static_cast<std::size_t>(pb.m) * pb.n * pb.r * pb.s);
  for (int x = 0; x < pb.m; ++x) {
    for (int y = 0; y < pb.n; ++y) {
      for (int a = 0; a < pb.r; ++a) {
        for (int b = 0; b < pb.s; ++b) out[pb.idx(x, y, a, b)] = t(x * pb.r + a, y * pb.s + b);
      }
    }
  }
  return out;
}

RealMatrix target_matrix(const Problem& pb) {
  RealMatrix out(pb.m * pb.r, pb.n * pb.s);
  for (int x = 0; x < pb.m; ++x) {
    for (int y = 0; y < pb.n; ++y) {
      for (int a = 0; a < pb.r; ++a) {
        for (int b = 0; b < pb.s; ++b) out(x * pb.r + a, y * pb.s + b) = pb.t(x, y, a, b);
      }
    }
  }
  return out;
}

std::vector<double> table_of(const Matrix& rho, const Povms& alice, const Povms& bob, const Problem& pb) {
  return flatten_table(table_matrix(rho, stack(alice, pb.d, true), stack(bob, pb.d, true), pb.d), pb);
}

double objective(const std::vector<double>& table, const Problem& pb) {
  double f = 0.0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double diff = table[k] - (*pb.target)[k];
    f += diff * diff;
  }
  return f;
}

// tr(X Y) for square X, Y.
double trace_product(const Matrix& x, const Matrix& y) { return x.cwiseProduct(y.transpose()).sum().real(); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

struct Atom {
  Vector v;
  double weight;
};

// rho as a convex combination of pure states, for away steps.
struct StateIterate {
  Matrix rho;
  std::vector<Atom> atoms;
};

void refresh_atoms(StateIterate& st) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(st.rho);
  st.atoms.clear();
  double total = 0.0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > 0.0) {
      st.atoms.push_back({eig.eigenvectors().col(i), eig.eigenvalues()(i)});
      total += eig.eigenvalues()(i);
    }
  }
  for (auto& atom : st.atoms) atom.weight /= total;
}

// Eigenvalues only, then inverse iteration just below the smallest one.
Vector lowest_eigenvector(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  const double lowest = Eigen::SelfAdjointEigenSolver<Matrix>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double shift = lowest - 1e-10 * (std::abs(lowest) + 1.0);
  const Eigen::PartialPivLU<Matrix> lu(h - shift * Matrix::Identity(n, n));
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = Complex(1.0, 0.1 * i);
  v.normalize();
  for (int it = 0; it < 3; ++it) v = lu.solve(v).normalized();
  return v;
}

// Conditional gradient over density operators with away steps.
void state_step(StateIterate& st, const Povms& alice, const Povms& bob, const Problem& pb, const RealMatrix& target,
                int iters) {
  const int d = pb.d;
  const Matrix alice_t = stack(alice, d, true);
  const Matrix bob_t = stack(bob, d, true);
  const Matrix alice_n = stack(alice, d, false);
  const Matrix bob_n = stack(bob, d, false);
  for (int it = 0; it < iters; ++it) {
    const RealMatrix res = table_matrix(st.rho, alice_t, bob_t, d) - target;
    const Matrix grad =
        hermitian_part(unrealign(alice_n.transpose() * (2.0 * res).cast<Complex>() * bob_n, d));

    const Vector u = lowest_eigenvector(grad);
    const double current = trace_product(grad, st.rho);
    double gain = u.dot(grad * u).real() - current;

    int away = -1;
    double away_value = -std::numeric_limits<double>::infinity();
    if (st.atoms.size() > 1) {
      Matrix vs(d * d, static_cast<Eigen::Index>(st.atoms.size()));
      for (std::size_t k = 0; k < st.atoms.size(); ++k) vs.col(k) = st.atoms[k].v;
      const Eigen::VectorXd values = vs.conjugate().cwiseProduct(grad * vs).colwise().sum().real().transpose();
      for (std::size_t k = 0; k < st.atoms.size(); ++k) {
        const double value = values(k);
        if (value > away_value) {
          away_value = value;
          away = static_cast<int>(k);
        }
      }
      if (current - away_value < gain) {
        gain = current - away_value;
      } else {
        away = -1;
      }
    }
    if (gain >= 0.0) break;

    Matrix direction;
    double cap = 1.0;
    if (away >= 0) {
      const Atom& atom = st.atoms[away];
      direction = st.rho - atom.v * atom.v.adjoint();
      cap = atom.weight / (1.0 - atom.weight);
    } else {
      direction = u * u.adjoint() - st.rho;
    }
    const RealMatrix delta = table_matrix(direction, alice_t, bob_t, d);
    const double den = delta.squaredNorm();
    if (den < kTinyDenominator) break;
    const double gamma = std::clamp(-res.cwiseProduct(delta).sum() / den, 0.0, cap);
    if (gamma <= 0.0) break;
    st.rho = hermitian_part(st.rho + gamma * direction);

    if (away >= 0) {
      for (auto& atom : st.atoms) atom.weight *= 1.0 + gamma;
      st.atoms[away].weight -= gamma;
      if (gamma >= cap) st.atoms.erase(st.atoms.begin() + away);
    } else {
      for (auto& atom : st.atoms) atom.weight *= 1.0 - gamma;
      bool merged = false;
      for (auto& atom : st.atoms) {
        if (std::norm(atom.v.dot(u)) > 1.0 - kSameAtom) {
          atom.weight += gamma;
          merged = true;
          break;
        }
      }
      if (!merged) st.atoms.push_back({u, gamma});
      std::erase_if(st.atoms, [](const Atom& a) { return a.weight <= 0.0; });
    }
    if (st.atoms.size() > static_cast<std::size_t>(2 * d * d)) refresh_atoms(st);
  }
}

// Conditional gradient over one question's POVM. `marginals[q][c]` is the
// partial trace of rho against the other side's element (q, c) and
// target(q, e, c) the matching target entry.
void measurement_step(std::vector<Matrix>& povm, const Povms& marginals,
                      const std::function<double(int, int, int)>& target, int iters) {
  const int outcomes = static_cast<int>(povm.size());
  const int others = static_cast<int>(marginals.size());
  const int other_outcomes = others == 0 ? 0 : static_cast<int>(marginals[0].size());
  const int d = static_cast<int>(povm[0].rows());
  auto entry = [&](int q, int e, int c) { return (q * outcomes + e) * other_outcomes + c; };
  std::vector<double> res(static_cast<std::size_t>(others) * outcomes * other_outcomes);

  for (int it = 0; it < iters; ++it) {
    std::vector<Matrix> grad(outcomes, Matrix::Zero(d, d));
    for (int q = 0; q < others; ++q) {
      for (int e = 0; e < outcomes; ++e) {
        for (int c = 0; c < other_outcomes; ++c) {
          const double r = trace_product(povm[e], marginals[q][c]) - target(q, e, c);
          res[entry(q, e, c)] = r;
          grad[e] += 2.0 * r * marginals[q][c];
        }
      }
    }
    for (auto& g : grad) g = hermitian_part(g);

    // Candidate extreme points: diagonalize pairwise gradient differences and
    // send each eigenvector to the outcome where it costs least.
    std::vector<Matrix> bases;
    if (outcomes == 1) bases.push_back(Matrix::Identity(d, d));
    for (int e = 0; e < outcomes; ++e) {
      for (int f = e + 1; f < outcomes; ++f) {
        bases.push_back(Eigen::SelfAdjointEigenSolver<Matrix>(grad[e] - grad[f]).eigenvectors());
      }
    }
    double best_linear = std::numeric_limits<double>::infinity();
    std::vector<Matrix> best;
    for (const Matrix& basis : bases) {
      std::vector<Matrix> vertex(outcomes, Matrix::Zero(d, d));
      for (int i = 0; i < d; ++i) {
        const Vector v = basis.col(i);
        int pick = 0;
        double low = std::numeric_limits<double>::infinity();
        for (int e = 0; e < outcomes; ++e) {
          const double cost = v.dot(grad[e] * v).real();
          if (cost < low) {
            low = cost;
            pick = e;
          }
        }
        vertex[pick] += v * v.adjoint();
      }
      double linear = 0.0;
      for (int e = 0; e < outcomes; ++e) linear += trace_product(grad[e], vertex[e] - povm[e]);
      if (linear < best_linear) {
        best_linear = linear;
        best = std::move(vertex);
      }
    }
    if (!(best_linear < 0.0)) break;

    std::vector<Matrix> direction(outcomes);
    for (int e = 0; e < outcomes; ++e) direction[e] = best[e] - povm[e];
    double num = 0.0, den = 0.0;
    for (int q = 0; q < others; ++q) {
      for (int e = 0; e < outcomes; ++e) {
        for (int c = 0; c < other_outcomes; ++c) {
          const double dv = trace_product(direction[e], marginals[q][c]);
          num += res[entry(q, e, c)] * dv;
          den += dv * dv;
        }
      }
    }
    if (den < kTinyDenominator) break;
    const double gamma = std::clamp(-num / den, 0.0, 1.0);
    if (gamma <= 0.0) break;
    for (int e = 0; e < outcomes; ++e) povm[e] = hermitian_part(povm[e] + gamma * direction[e]);
  }
}

std::vector<Matrix> random_projective(int d, int outcomes, Rng& rng) {
  const Matrix u = haar_unitary(d, rng);
  std::uniform_int_distribution<int> pick(0, outcomes - 1);
  std::vector<Matrix> out(outcomes, Matrix::Zero(d, d));
  for (int i = 0; i < d; ++i) out[pick(rng)] += u.col(i) * u.col(i).adjoint();
  return out;
}

// marginals[q][e] for every element of `ops`, computed against realigned rho.
// Alice side: tr_B[rho (I (x) B)]; Bob side: tr_A[(A (x) I) rho].
Povms alice_marginals(const Matrix& realigned, const Povms& bob, int d) {
  const Matrix cols = realigned * stack(bob, d, true).transpose();
  const int per = static_cast<int>(bob[0].size());
  Povms out(bob.size(), std::vector<Matrix>(per));
  for (std::size_t q = 0; q < bob.size(); ++q) {
    for (int e = 0; e < per; ++e) out[q][e] = unflatten(cols.col(q * per + e), d);
  }
  return out;
}

Povms bob_marginals(const Matrix& realigned, const Povms& alice, int d) {
  const Matrix rows = stack(alice, d, true) * realigned;
  const int per = static_cast<int>(alice[0].size());
  Povms out(alice.size(), std::vector<Matrix>(per));
  for (std::size_t q = 0; q < alice.size(); ++q) {
    for (int e = 0; e < per; ++e) out[q][e] = unflatten(rows.row(q * per + e).transpose(), d);
  }
  return out;
}

struct RestartOutcome {
  PovmStrategy strategy;
  RestartTrace trace;
};

RestartOutcome run_restart(const Problem& pb, const SeesawConfig& cfg, int restart) {
  std::seed_seq seq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(restart)};
  Rng rng(seq);
  const int d = pb.d;
  const RealMatrix target = target_matrix(pb);
  StateIterate st;
  const Vector psi = haar_state(d * d, rng);
  st.rho = psi * psi.adjoint();
  st.atoms.push_back({psi, 1.0});
  Povms alice, bob;
  for (int x = 0; x < pb.m; ++x) alice.push_back(random_projective(d, pb.r, rng));
  for (int y = 0; y < pb.n; ++y) bob.push_back(random_projective(d, pb.s, rng));

  RestartOutcome out;
  double f = objective(table_of(st.rho, alice, bob, pb), pb);
  out.trace.objective.push_back(f);
  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    if (f <= kZeroObjective) {
      out.trace.converged = true;
      break;
    }
    StateIterate st_next = st;
    Povms alice_next = alice;
    Povms bob_next = bob;
    state_step(st_next, alice_next, bob_next, pb, target, cfg.inner_iters);
    const Matrix realigned = realign(st_next.rho, d);
    const Povms for_alice = alice_marginals(realigned, bob_next, d);
    for (int x = 0; x < pb.m; ++x) {
      measurement_step(alice_next[x], for_alice, [&](int y, int a, int b) { return pb.t(x, y, a, b); },
                       cfg.inner_iters);
    }
    const Povms for_bob = bob_marginals(realigned, alice_next, d);
    for (int y = 0; y < pb.n; ++y) {
      measurement_step(bob_next[y], for_bob, [&](int x, int b, int a) { return pb.t(x, y, a, b); },
                       cfg.inner_iters);
    }
    const double g = objective(table_of(st_next.rho, alice_next, bob_next, pb), pb);
    if (g > f) {
      // Rounding noise at the floor; keep the previous iterate.
      out.trace.converged = true;
      break;
    }
    st = std::move(st_next);
    alice = std::move(alice_next);
    bob = std::move(bob_next);
    out.trace.objective.push_back(g);
    const bool stalled = f - g <= cfg.convergence_tol * f;
    f = g;
    if (stalled || f <= kZeroObjective) {
      out.trace.converged = true;
      break;
    }
  }
  out.trace.iterations = static_cast<int>(out.trace.objective.size()) - 1;
  out.strategy = PovmStrategy{d, st.rho, std::move(alice), std::move(bob)};
  return out;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(m));
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

// Unitary on C^d (x) C^k whose columns at (v, 0) are sum_a sqrt(E_a)|v> (x) |a>.
Matrix naimark_unitary(const std::vector<Matrix>& povm) {
  const int d = static_cast<int>(povm[0].rows());
  const int k = static_cast<int>(povm.size());
  Matrix iso = Matrix::Zero(d * k, d);
  for (int a = 0; a < k; ++a) {
    const Matrix root = psd_sqrt(povm[a]);
    for (int i = 0; i < d; ++i) {
      for (int v = 0; v < d; ++v) iso(i * k + a, v) = root(i, v);
    }
  }
  // Polar cleanup against accumulated drift in sum_a E_a.
  Eigen::SelfAdjointEigenSolver<Matrix> gram(iso.adjoint() * iso);
  iso = iso * (gram.eigenvectors() * gram.eigenvalues().cwiseInverse().cwiseSqrt().cast<Complex>().asDiagonal() *
               gram.eigenvectors().adjoint());
  Eigen::HouseholderQR<Matrix> qr(iso);
  const Matrix q = qr.householderQ();
  Matrix u(d * k, d * k);
  int spare = d;
  for (int i = 0; i < d; ++i) {
    for (int c = 0; c < k; ++c) u.col(i * k + c) = c == 0 ? Vector(iso.col(i)) : Vector(q.col(spare++));
  }
  return u;
}

Measurement dilated_measurement(const std::vector<Matrix>& povm, int register_dim) {
  const int d = static_cast<int>(povm[0].rows());
  const int k = static_cast<int>(povm.size());
  const Matrix u = naimark_unitary(povm);
  Measurement out;
  for (int a = 0; a < k; ++a) {
    Matrix select = Matrix::Zero(d * k, d * k);
    for (int i = 0; i < d; ++i) select(i * k + a, i * k + a) = 1.0;
    const Matrix proj = hermitian_part(u.adjoint() * select * u);
    out.push_back(register_dim == 1 ? proj : kron(Matrix::Identity(register_dim, register_dim), proj));
  }
  return out;
}

}  // namespace

void SeesawConfig::validate() const {
  if (local_dim < 1) throw std::invalid_argument("local_dim must be at least 1");
  if (max_outer_iters < 1 || inner_iters < 1) throw std::invalid_argument("iteration counts must be at least 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (!(convergence_tol >= 0.0)) throw std::invalid_argument("convergence_tol must be non-negative");
  if (metric != Metric::kL2) throw std::invalid_argument("see-saw supports only the l2 metric");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

std::vector<double> povm_table(const PovmStrategy& s) {
  if (s.alice.empty() || s.bob.empty()) throw std::invalid_argument("POVM strategy needs questions on both sides");
  const std::vector<double> unused;
  const Problem pb{static_cast<int>(s.alice.size()), static_cast<int>(s.bob.size()),
                   static_cast<int>(s.alice[0].size()), static_cast<int>(s.bob[0].size()), s.dim, &unused};
  return table_of(s.density, s.alice, s.bob, pb);
}

Strategy dilate(const PovmStrategy& s, double rank_cutoff) {
  const int d = s.dim;
  const int ka = static_cast<int>(s.alice.at(0).size());
  const int kb = static_cast<int>(s.bob.at(0).size());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(hermitian_part(s.density));
  std::vector<int> keep;
  for (int i = d * d - 1; i >= 0; --i) {
    if (eig.eigenvalues()(i) > rank_cutoff) keep.push_back(i);
  }
  if (keep.empty()) throw std::invalid_argument("density operator has no support above the cutoff");
  const int rank = static_cast<int>(keep.size());

  Strategy out;
  out.dA = rank * d * ka;
  out.dB = d * kb;
  out.state = Vector::Zero(static_cast<Eigen::Index>(out.dA) * out.dB);
  for (int r = 0; r < rank; ++r) {
    const double weight = std::sqrt(eig.eigenvalues()(keep[r]));
    const Vector phi = eig.eigenvectors().col(keep[r]);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const Eigen::Index alice = (static_cast<Eigen::Index>(r) * d + i) * ka;
        const Eigen::Index bob = static_cast<Eigen::Index>(j) * kb;
        out.state(alice * out.dB + bob) = weight * phi(i * d + j);
      }
    }
  }
  out.state /= out.state.norm();
  for (const auto& povm : s.alice) out.alice.push_back(dilated_measurement(povm, rank));
  for (const auto& povm : s.bob) out.bob.push_back(dilated_measurement(povm, 1));
  return out;
}

SeesawResult optimize(const Correlation& target, const SeesawConfig& cfg) {
  cfg.validate();
  const Problem pb{target.m(), target.n(), target.r(), target.s(), cfg.local_dim, &target.raw()};

  std::vector<RestartOutcome> outcomes(cfg.restarts);
  int workers = cfg.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.threads;
  workers = std::clamp(workers, 1, cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < cfg.restarts; k = next++) outcomes[k] = run_restart(pb, cfg, k);
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SeesawResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.restarts; ++k) {
    const double f = outcomes[k].trace.objective.back();
    if (f < best) {
      best = f;
      result.best_restart = k;
    }
    result.traces.push_back(outcomes[k].trace);
  }
  result.best = outcomes[result.best_restart].strategy;
  result.converged = outcomes[result.best_restart].trace.converged;
  result.distance = std::sqrt(std::max(best, 0.0));
  if (cfg.rounding == Rounding::kProjective) {
    Strategy rounded = dilate(result.best);
    result.rounded_distance = distance(target, induce(rounded), Metric::kL2);
    result.dilated_alice_dim = rounded.dA;
    result.dilated_bob_dim = rounded.dB;
    result.rounded = std::move(rounded);
  }
  return result;
}

double upper_bound_from_truncation(double alpha, int d, Metric metric) {
  if (d < 4 || d % 2 != 0) throw std::invalid_argument("local dimension must be even and at least 4");
  return separating::truncation_distance(alpha, d / 2, metric);
}

}  // namespace qsep::seesaw
