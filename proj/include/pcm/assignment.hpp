#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "pcm/types.hpp"

namespace pcm {

struct SolverConfig {
  // optimal_assignment solves exactly for N <= exact_threshold.
  std::size_t exact_threshold = 256;
  // Final auction price precision; the result is within N * epsilon_final
  // of the optimum.
  double epsilon_final = 1e-4;
  double epsilon_scaling_factor = 4.0;
  // Budget in bid operations across all scaling phases.
  std::uint64_t max_auction_rounds = 10'000'000;
  // Above this N the auction recomputes cost rows instead of holding the
  // dense N x N matrix.
  std::size_t dense_matrix_limit = 4096;

  void validate() const;
};

// Unsquared Euclidean distance between x1[i] and x2[j].
double cost(const PointCloud& x1, std::size_t i, const PointCloud& x2, std::size_t j);

// Sum of cost(x1, i, x2, mapping[i]). The terms are added in ascending order,
// so a mapping and its inverse (with the clouds swapped) give the same bits.
double assignment_cost(const PointCloud& x1, const PointCloud& x2, std::span<const std::uint32_t> mapping);

// Minimum-cost bijection by shortest augmenting paths, O(N^3).
Assignment solve_exact(const PointCloud& x1, const PointCloud& x2);

// Epsilon-scaling forward auction. Cost is within N * epsilon_final of the
// optimum. Throws ConvergenceError when the bid budget runs out.
Assignment solve_auction(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config = {});

// solve_exact for N <= exact_threshold, solve_auction otherwise.
Assignment optimal_assignment(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config = {});

// Earth mover's distance: mean displacement under the optimal assignment.
double emd(const PointCloud& x1, const PointCloud& x2, const SolverConfig& config = {});

}  // namespace pcm
