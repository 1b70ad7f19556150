#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "levysep/grid.hpp"
#include "levysep/sim.hpp"

namespace levysep {

struct ErrorSample {
  std::size_t level = 0;
  std::size_t fineLevel = 0;
  double value = 0.0;
  std::uint64_t replication = 0;
  std::uint64_t seed = 0;
  // Checksum of the observed path at the fine level; lets paired runs prove they shared X.
  std::uint64_t pathChecksum = 0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rSquared = 0.0;
};

struct LevelMean {
  double level;
  double meanError;
};

/// Sup over the fine grid of |bridge(wFine)[i] - bridge(wApprox)[floor(i n / N)]|.
/// The level-n approximation is extended left-constant between its grid points.
double sup_bridge_error(const GridPath& wFine, const GridPath& wApprox);

/// values[k] = sum_i sign(J_i) (k/grid - 1{T_i <= k/grid}).
GridPath cpp_limit_process(const JumpRecord& jumps, std::size_t grid);

/// sqrt(n / (2 log n)) * (W_sk - W^(n) - (W_sk(1) - W^(n)(1)) t) on the level-n
/// grid, where W_sk is the level-n skeleton of wFine. Requires n >= 3.
GridPath scaled_cpp_error(const GridPath& wFine, const GridPath& wApprox);

/// Max |a[i] - b[i]|; both paths on the same grid.
double sup_distance(const GridPath& a, const GridPath& b);

/// Ordinary least squares of log(meanError) on log(level).
RateFit fit_rate(std::span<const LevelMean> points);

double cross_variation(const IncrementSeq& a, const IncrementSeq& b);

}  // namespace levysep
