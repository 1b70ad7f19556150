#include "levysep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "levysep/decompose.hpp"

namespace levysep {

double sup_bridge_error(const GridPath& wFine, const GridPath& wApprox) {
  const std::size_t fine = wFine.n();
  const std::size_t n = wApprox.n();
  if (fine % n != 0) {
    throw std::invalid_argument("sup_bridge_error: level " + std::to_string(n) + " does not divide " +
                                std::to_string(fine));
  }
  const GridPath fineBridge = bridge_of(wFine);
  const GridPath coarseBridge = bridge_of(wApprox);
  const std::size_t stride = fine / n;
  double sup = 0.0;
  for (std::size_t i = 0; i <= fine; ++i) {
    sup = std::max(sup, std::abs(fineBridge[i] - coarseBridge[i / stride]));
  }
  return sup;
}

GridPath cpp_limit_process(const JumpRecord& jumps, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("cpp_limit_process: grid must be positive");
  if (jumps.times.size() != jumps.sizes.size()) throw std::invalid_argument("JumpRecord: times and sizes differ in length");
  std::vector<double> values(grid + 1, 0.0);
  for (std::size_t k = 1; k <= grid; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(grid);
    double v = 0.0;
    for (std::size_t j = 0; j < jumps.times.size(); ++j) {
      const double sign = jumps.sizes[j] > 0.0 ? 1.0 : -1.0;
      v += sign * (t - (jumps.times[j] <= t ? 1.0 : 0.0));
    }
    values[k] = v;
  }
  // The sum vanishes at t = 1 in exact arithmetic.
  values[grid] = 0.0;
  return GridPath(std::move(values));
}

GridPath scaled_cpp_error(const GridPath& wFine, const GridPath& wApprox) {
  const std::size_t n = wApprox.n();
  if (n < 3) throw std::invalid_argument("scaled_cpp_error needs n >= 3");
  const GridPath skeleton = coarsen(wFine, n);
  const double level = static_cast<double>(n);
  const double scale = std::sqrt(level / (2.0 * std::log(level)));
  const double endGap = skeleton.back() - wApprox.back();
  std::vector<double> values(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / level;
    values[k] = scale * (skeleton[k] - wApprox[k] - endGap * t);
  }
  values[n] = 0.0;
  return GridPath(std::move(values));
}

double sup_distance(const GridPath& a, const GridPath& b) {
  if (a.n() != b.n()) throw std::invalid_argument("sup_distance: grid levels differ");
  double sup = 0.0;
  for (std::size_t i = 0; i <= a.n(); ++i) sup = std::max(sup, std::abs(a[i] - b[i]));
  return sup;
}

RateFit fit_rate(std::span<const LevelMean> points) {
  std::set<double> levels;
  for (const auto& p : points) {
    if (!(p.level > 0.0)) throw std::invalid_argument("fit_rate: levels must be positive");
    if (!(p.meanError > 0.0)) throw std::invalid_argument("fit_rate: errors must be positive");
    levels.insert(p.level);
  }
  if (levels.size() < 2) throw std::invalid_argument("fit_rate needs at least two distinct levels");

  const double count = static_cast<double>(points.size());
  double meanX = 0.0, meanY = 0.0;
  for (const auto& p : points) {
    meanX += std::log(p.level);
    meanY += std::log(p.meanError);
  }
  meanX /= count;
  meanY /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    const double dx = std::log(p.level) - meanX;
    const double dy = std::log(p.meanError) - meanY;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = meanY - fit.slope * meanX;
  fit.rSquared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

double cross_variation(const IncrementSeq& a, const IncrementSeq& b) {
  if (a.n() != b.n()) throw std::invalid_argument("cross_variation: lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.n(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace levysep
