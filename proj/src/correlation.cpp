#include "qsep/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qsep {

Correlation::Correlation(int m, int n, int r, int s, std::vector<double> table, double normalization_tol)
    : m_(m), n_(n), r_(r), s_(s), table_(std::move(table)) {
  if (m < 1 || n < 1 || r < 1 || s < 1) {
    throw std::invalid_argument("correlation dimensions must be positive");
  }
  if (table_.size() != static_cast<std::size_t>(m) * n * r * s) {
    throw std::invalid_argument("correlation table has " + std::to_string(table_.size()) + " entries, expected " +
                                std::to_string(m * n * r * s));
  }
  for (double& v : table_) {
    if (!std::isfinite(v)) throw std::invalid_argument("correlation entry is not finite");
    if (v < 0.0) {
      if (v < -kClampTol) {
        std::ostringstream msg;
        msg << "negative correlation entry " << v;
        throw std::invalid_argument(msg.str());
      }
      v = 0.0;
    }
  }
  for (int x = 0; x < m_; ++x) {
    for (int y = 0; y < n_; ++y) {
      double total = 0.0;
      for (int a = 0; a < r_; ++a) {
        for (int b = 0; b < s_; ++b) total += table_[index(x, y, a, b)];
      }
      if (std::abs(total - 1.0) > normalization_tol) {
        std::ostringstream msg;
        msg << "table (" << x << "," << y << ") sums to " << total;
        throw std::invalid_argument(msg.str());
      }
    }
  }
}

CorrelationTable Correlation::table(int x, int y) const {
  if (x < 0 || x >= m_ || y < 0 || y >= n_) throw std::out_of_range("question pair out of range");
  CorrelationTable t{x, y, Eigen::MatrixXd(r_, s_)};
  for (int a = 0; a < r_; ++a) {
    for (int b = 0; b < s_; ++b) t.entries(a, b) = (*this)(x, y, a, b);
  }
  return t;
}

Correlation direct_sum(std::span<const WeightedCorrelation> blocks) {
  if (blocks.empty()) throw std::invalid_argument("direct_sum needs at least one block");
  const int m = blocks.front().block.m();
  const int n = blocks.front().block.n();
  int r = 0;
  int s = 0;
  double total_weight = 0.0;
  for (const auto& wb : blocks) {
    if (wb.block.m() != m || wb.block.n() != n) {
      throw std::invalid_argument("direct_sum blocks have mismatched question counts");
    }
    if (wb.weight < 0.0) throw std::invalid_argument("direct_sum weight is negative");
    r += wb.block.r();
    s += wb.block.s();
    total_weight += wb.weight;
  }
  if (std::abs(total_weight - 1.0) > kNormalizationTol) {
    throw std::invalid_argument("direct_sum weights sum to " + std::to_string(total_weight));
  }
  std::vector<double> table(static_cast<std::size_t>(m) * n * r * s, 0.0);
  int a_off = 0;
  int b_off = 0;
  for (const auto& wb : blocks) {
    const Correlation& q = wb.block;
    for (int x = 0; x < m; ++x) {
      for (int y = 0; y < n; ++y) {
        for (int a = 0; a < q.r(); ++a) {
          for (int b = 0; b < q.s(); ++b) {
            table[Correlation::flat_index(n, r, s, x, y, a_off + a, b_off + b)] = wb.weight * q(x, y, a, b);
          }
        }
      }
    }
    a_off += q.r();
    b_off += q.s();
  }
  return Correlation(m, n, r, s, std::move(table));
}

namespace {

void validate_permutation(const std::vector<int>& perm, int size) {
  if (static_cast<int>(perm.size()) != size) throw std::invalid_argument("permutation has wrong length");
  std::vector<bool> seen(size, false);
  for (int v : perm) {
    if (v < 0 || v >= size || seen[v]) throw std::invalid_argument("not a permutation");
    seen[v] = true;
  }
}

}  // namespace

Correlation permute_answers(const Correlation& p, const std::vector<int>& alice_perm, const std::vector<int>& bob_perm) {
  validate_permutation(alice_perm, p.r());
  validate_permutation(bob_perm, p.s());
  std::vector<double> table(p.raw().size());
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      for (int a = 0; a < p.r(); ++a) {
        for (int b = 0; b < p.s(); ++b) {
          table[Correlation::flat_index(p.n(), p.r(), p.s(), x, y, alice_perm[a], bob_perm[b])] = p(x, y, a, b);
        }
      }
    }
  }
  return Correlation(p.m(), p.n(), p.r(), p.s(), std::move(table));
}

void validate_partition(const AnswerPartition& partition, int answers, const char* side) {
  std::vector<bool> seen(answers, false);
  int count = 0;
  for (const auto& cls : partition) {
    if (cls.empty()) throw std::invalid_argument(std::string(side) + " partition has an empty class");
    for (int a : cls) {
      if (a < 0 || a >= answers) throw std::invalid_argument(std::string(side) + " partition index out of range");
      if (seen[a]) throw std::invalid_argument(std::string(side) + " partition classes overlap");
      seen[a] = true;
      ++count;
    }
  }
  if (count != answers) throw std::invalid_argument(std::string(side) + " partition does not cover all answers");
}

BlockStructureReport block_structure_check(const Correlation& p, const AnswerPartition& alice_partition,
                                           const AnswerPartition& bob_partition, double tol) {
  validate_partition(alice_partition, p.r(), "alice");
  validate_partition(bob_partition, p.s(), "bob");
  if (alice_partition.size() != bob_partition.size()) {
    throw std::invalid_argument("alice and bob partitions have different block counts");
  }
  const int blocks = static_cast<int>(alice_partition.size());
  std::vector<int> alice_block(p.r());
  std::vector<int> bob_block(p.s());
  for (int i = 0; i < blocks; ++i) {
    for (int a : alice_partition[i]) alice_block[a] = i;
    for (int b : bob_partition[i]) bob_block[b] = i;
  }

  BlockStructureReport report;
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      for (int a = 0; a < p.r(); ++a) {
        for (int b = 0; b < p.s(); ++b) {
          if (alice_block[a] != bob_block[b] && p(x, y, a, b) > tol) {
            report.failure = "cross-block mass";
            report.offending_value = p(x, y, a, b);
            report.x = x;
            report.y = y;
            report.a = a;
            report.b = b;
            return report;
          }
        }
      }
    }
  }

  // Per-question-pair block masses; the weight must not depend on (x, y).
  std::vector<double> mass(static_cast<std::size_t>(p.m()) * p.n() * blocks, 0.0);
  auto mass_at = [&](int x, int y, int i) -> double& {
    return mass[(static_cast<std::size_t>(x) * p.n() + y) * blocks + i];
  };
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      for (int i = 0; i < blocks; ++i) {
        for (int a : alice_partition[i]) {
          for (int b : bob_partition[i]) mass_at(x, y, i) += p(x, y, a, b);
        }
      }
    }
  }
  report.weights.resize(blocks);
  for (int i = 0; i < blocks; ++i) report.weights[i] = mass_at(0, 0, i);
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      for (int i = 0; i < blocks; ++i) {
        if (std::abs(mass_at(x, y, i) - report.weights[i]) > tol) {
          report.failure = "block weight varies with question pair";
          report.offending_value = mass_at(x, y, i) - report.weights[i];
          report.x = x;
          report.y = y;
          report.a = i;
          report.b = i;
          report.weights.clear();
          return report;
        }
      }
    }
  }

  for (int i = 0; i < blocks; ++i) {
    if (report.weights[i] <= tol) {
      report.blocks.emplace_back(std::nullopt);
      continue;
    }
    const auto& as = alice_partition[i];
    const auto& bs = bob_partition[i];
    const int ri = static_cast<int>(as.size());
    const int si = static_cast<int>(bs.size());
    std::vector<double> table(static_cast<std::size_t>(p.m()) * p.n() * ri * si);
    for (int x = 0; x < p.m(); ++x) {
      for (int y = 0; y < p.n(); ++y) {
        const double w = mass_at(x, y, i);
        for (int a = 0; a < ri; ++a) {
          for (int b = 0; b < si; ++b) {
            table[Correlation::flat_index(p.n(), ri, si, x, y, a, b)] = p(x, y, as[a], bs[b]) / w;
          }
        }
      }
    }
    report.blocks.emplace_back(Correlation(p.m(), p.n(), ri, si, std::move(table)));
  }
  report.ok = true;
  return report;
}

Correlation restrict(const Correlation& p, const std::vector<int>& xs, const std::vector<int>& ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("restrict needs nonempty question subsets");
  for (int x : xs) {
    if (x < 0 || x >= p.m()) throw std::invalid_argument("alice question " + std::to_string(x) + " out of range");
  }
  for (int y : ys) {
    if (y < 0 || y >= p.n()) throw std::invalid_argument("bob question " + std::to_string(y) + " out of range");
  }
  const int m = static_cast<int>(xs.size());
  const int n = static_cast<int>(ys.size());
  std::vector<double> table(static_cast<std::size_t>(m) * n * p.r() * p.s());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int a = 0; a < p.r(); ++a) {
        for (int b = 0; b < p.s(); ++b) {
          table[Correlation::flat_index(n, p.r(), p.s(), i, j, a, b)] = p(xs[i], ys[j], a, b);
        }
      }
    }
  }
  return Correlation(m, n, p.r(), p.s(), std::move(table));
}

Metric parse_metric(const std::string& name) {
  if (name == "max_tv") return Metric::kMaxTv;
  if (name == "l2") return Metric::kL2;
  throw std::invalid_argument("unknown metric '" + name + "' (expected max_tv or l2)");
}

std::string metric_name(Metric metric) { return metric == Metric::kMaxTv ? "max_tv" : "l2"; }

double distance(const Correlation& p, const Correlation& q, Metric metric) {
  if (!p.same_shape(q)) throw std::invalid_argument("distance between correlations of different shapes");
  if (metric == Metric::kL2) {
    double total = 0.0;
    for (std::size_t k = 0; k < p.raw().size(); ++k) {
      const double d = p.raw()[k] - q.raw()[k];
      total += d * d;
    }
    return std::sqrt(total);
  }
  double worst = 0.0;
  for (int x = 0; x < p.m(); ++x) {
    for (int y = 0; y < p.n(); ++y) {
      double tv = 0.0;
      for (int a = 0; a < p.r(); ++a) {
        for (int b = 0; b < p.s(); ++b) tv += std::abs(p(x, y, a, b) - q(x, y, a, b));
      }
      worst = std::max(worst, 0.5 * tv);
    }
  }
  return worst;
}

}  // namespace qsep
