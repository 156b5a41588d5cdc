#include "pcm/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "pcm/error.hpp"
#include "pcm/simd.hpp"

namespace pcm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair(const PointCloud& x1, const PointCloud& x2) {
  require_valid(x1, "first cloud");
  require_valid(x2, "second cloud");
  if (x1.size() != x2.size())
    throw InputError("cloud size mismatch: " + std::to_string(x1.size()) + " vs " + std::to_string(x2.size()));
  if (x1.size() > std::numeric_limits<std::uint32_t>::max()) throw InputError("cloud too large");
}

// Row i holds |x1_i - x2_j| for all j.
std::vector<double> cost_matrix(const PointCloud& x1, const simd::PointsSoA& x2) {
  const std::size_t n = x1.size();
  const auto& k = simd::kernels();
  std::vector<double> c(n * n);
  for (std::size_t i = 0; i < n; ++i) k.distances(x2.view(), simd::Query::from(x1[i]), c.data() + i * n);
  return c;
}

// Every optimal assignment uses only tight edges (zero reduced cost under the
// final potentials). Fix rows in order, giving each the smallest tight column
// that still leaves a perfect tight matching on the rows after it.
class TightGraph {
 public:
  TightGraph(const std::vector<double>& c, const std::vector<double>& u, const std::vector<double>& v,
             std::vector<std::uint32_t>& mapping)
      : n_(mapping.size()), col_of_(mapping), row_of_(n_), seen_(n_), adj_(n_) {
    double scale = 1.0;
    for (double x : c) scale = std::max(scale, x);
    const double tol = 1e-11 * scale;
    for (std::size_t i = 0; i < n_; ++i) {
      row_of_[col_of_[i]] = static_cast<std::uint32_t>(i);
      for (std::size_t j = 0; j < n_; ++j)
        if (c[i * n_ + j] - u[i + 1] - v[j + 1] <= tol) adj_[i].push_back(static_cast<std::uint32_t>(j));
    }
  }

  void canonicalize() {
    for (std::uint32_t i = 0; i < n_; ++i) {
      for (std::uint32_t j : adj_[i]) {
        if (j >= col_of_[i]) break;
        if (row_of_[j] < i) continue;  // held by a fixed row
        std::fill(seen_.begin(), seen_.end(), 0);
        seen_[i] = 1;
        const std::uint32_t target = col_of_[i];
        if (reroute(row_of_[j], j, target, i)) {
          row_of_[j] = i;
          col_of_[i] = j;
          break;
        }
      }
    }
  }

 private:
  // Moves row r off column `from` onto another free tight column, pushing
  // owners along until one lands on `target`.
  bool reroute(std::uint32_t r, std::uint32_t from, std::uint32_t target, std::uint32_t fixed_upto) {
    seen_[r] = 1;
    for (std::uint32_t j : adj_[r]) {
      if (j == from) continue;
      if (j == target || (row_of_[j] > fixed_upto && !seen_[row_of_[j]] && reroute(row_of_[j], j, target, fixed_upto))) {
        row_of_[j] = r;
        col_of_[r] = j;
        return true;
      }
    }
    return false;
  }

  std::size_t n_;
  std::vector<std::uint32_t>& col_of_;
  std::vector<std::uint32_t> row_of_;
  std::vector<char> seen_;
  std::vector<std::vector<std::uint32_t>> adj_;
};

void lex_smallest_optimum(const std::vector<double>& c, const std::vector<double>& u, const std::vector<double>& v,
                          std::vector<std::uint32_t>& mapping) {
  TightGraph(c, u, v, mapping).canonicalize();
}

}  // namespace

void SolverConfig::validate() const {
  if (exact_threshold < 1) throw InputError("exact_threshold must be >= 1");
  if (!(epsilon_final > 0.0) || !std::isfinite(epsilon_final)) throw InputError("epsilon_final must be > 0");
  if (!(epsilon_scaling_factor > 1.0)) throw InputError("epsilon_scaling_factor must be > 1");
  if (max_auction_rounds < 1) throw InputError("max_auction_rounds must be >= 1");
}

double cost(const PointCloud& x1, std::size_t i, const PointCloud& x2, std::size_t j) {
  if (i >= x1.size() || j >= x2.size()) throw InputError("cost: point index out of range");
  return distance(x1[i], x2[j]);
}

double assignment_cost(const PointCloud& x1, const PointCloud& x2, std::span<const std::uint32_t> mapping) {
  std::vector<double> terms(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) terms[i] = cost(x1, i, x2, mapping[i]);
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

Assignment solve_exact(const PointCloud& x1, const PointCloud& x2) {
  check_pair(x1, x2);
  const std::size_t n = x1.size();
  const std::vector<double> c = cost_matrix(x1, simd::PointsSoA(x2.points()));

  // Shortest augmenting paths with row/column potentials. Columns and rows
  // are 1-based here; column 0 is the virtual root of each search tree.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t row = 1; row <= n; ++row) {
    row_of[0] = row;
    std::size_t col0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col0] = 1;
      const std::size_t r = row_of[col0];
      const double* crow = c.data() + (r - 1) * n;
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double reduced = crow[col - 1] - u[r] - v[col];
        if (reduced < min_slack[col]) {
          min_slack[col] = reduced;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[row_of[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (row_of[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      row_of[col0] = row_of[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  Assignment a;
  a.mapping.resize(n);
  for (std::size_t col = 1; col <= n; ++col) a.mapping[row_of[col] - 1] = static_cast<std::uint32_t>(col - 1);
  lex_smallest_optimum(c, u, v, a.mapping);
  a.total_cost = assignment_cost(x1, x2, a.mapping);
  a.is_exact = true;
  return a;
}

namespace {

// Benefit rows (negated costs), either held densely or rebuilt per request.
class BenefitRows {
 public:
  BenefitRows(const PointCloud& x1, const PointCloud& x2, bool dense)
      : x1_(x1), x2_(x2.points()), n_(x1.size()), dense_(dense), scratch_(dense ? 0 : n_) {
    if (dense_) {
      rows_ = cost_matrix(x1, x2_);
      for (double& b : rows_) b = -b;
    }
  }

  const double* row(std::size_t i) {
    if (dense_) return rows_.data() + i * n_;
    simd::kernels().distances(x2_.view(), simd::Query::from(x1_[i]), scratch_.data());
    for (double& b : scratch_) b = -b;
    return scratch_.data();
  }

  // Largest cost, i.e. -min benefit.
  double max_cost() {
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double* r = row(i);
      for (std::size_t j = 0; j < n_; ++j) m = std::max(m, -r[j]);
    }
    return m;
  }

 private:
  const PointCloud& x1_;
  simd::PointsSoA x2_;
  std::size_t n_;
  bool dense_;
  std::vector<double> rows_;
  std::vector<double> scratch_;
};

constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();

}  // namespace

Assignment solve_auction(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config) {
  check_pair(x1, x2);
  config.validate();
  const std::size_t n = x1.size();
  const auto& k = simd::kernels();

  BenefitRows benefit(x1, x2, n <= config.dense_matrix_limit);
  const double max_cost = benefit.max_cost();

  Assignment a;
  a.is_exact = false;
  a.mapping.resize(n);
  if (max_cost == 0.0 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) a.mapping[i] = static_cast<std::uint32_t>(i);
    a.total_cost = assignment_cost(x1, x2, a.mapping);
    return a;
  }

  std::vector<double> price(n, 0.0);
  std::vector<std::uint32_t> object_of(n, kUnassigned);  // person -> object
  std::vector<std::uint32_t> owner(n, kUnassigned);      // object -> person
  std::deque<std::uint32_t> queue;
  std::uint64_t bids = 0;

  double eps = max_cost / 4.0;
  for (;;) {
    // Keep pairs that already satisfy eps-complementary slackness for the
    // new eps; everyone else bids again.
    queue.clear();
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t j = object_of[i];
      if (j != kUnassigned) {
        const double* row = benefit.row(i);
        const auto bt = k.best_two(row, price.data(), n);
        if (row[j] - price[j] >= bt.best - eps) continue;
        owner[j] = kUnassigned;
        object_of[i] = kUnassigned;
      }
      queue.push_back(i);
    }

    while (!queue.empty()) {
      if (++bids > config.max_auction_rounds)
        throw ConvergenceError("auction did not converge within " + std::to_string(config.max_auction_rounds) +
                               " bids (eps = " + std::to_string(eps) + ")");
      const std::uint32_t i = queue.front();
      queue.pop_front();
      const auto bt = k.best_two(benefit.row(i), price.data(), n);
      const std::uint32_t j = bt.index;
      price[j] += (bt.best - bt.second) + eps;
      if (owner[j] != kUnassigned) {
        object_of[owner[j]] = kUnassigned;
        queue.push_back(owner[j]);
      }
      owner[j] = i;
      object_of[i] = j;
    }

    if (eps <= config.epsilon_final) break;
    eps /= config.epsilon_scaling_factor;
  }

  a.mapping = object_of;
  a.total_cost = assignment_cost(x1, x2, a.mapping);
  return a;
}

Assignment optimal_assignment(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config) {
  config.validate();
  if (x1.size() <= config.exact_threshold) return solve_exact(x1, x2);
  return solve_auction(x1, x2, config);
}

double emd(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config) {
  const Assignment a = optimal_assignment(x1, x2, config);
  return a.total_cost / static_cast<double>(x1.size());
}

}  // namespace pcm
