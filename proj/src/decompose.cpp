#include "levysep/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace levysep {

namespace {

// Indices of `values` in ascending order of value; throws on exact ties.
std::vector<std::size_t> argsort_strict(std::span<const double> values, const char* which) {
  std::vector<std::pair<double, std::size_t>> keyed(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) throw std::invalid_argument(std::string(which) + " increments contain NaN");
    keyed[i] = {values[i], i};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> order(values.size());
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    if (k > 0 && keyed[k].first == keyed[k - 1].first) {
      throw DegenerateInput(std::string("tied ") + which + " increments at positions " +
                            std::to_string(keyed[k - 1].second) + " and " + std::to_string(keyed[k].second));
    }
    order[k] = keyed[k].second;
  }
  return order;
}

}  // namespace

std::vector<std::size_t> rank_permutation(const IncrementSeq& x, const IncrementSeq& wPrime) {
  if (x.n() != wPrime.n()) throw std::invalid_argument("rank_permutation: sequences differ in length");
  const auto byX = argsort_strict(x.deltas(), "observed");
  const auto byW = argsort_strict(wPrime.deltas(), "W'");
  std::vector<std::size_t> pi(x.n());
  for (std::size_t k = 0; k < pi.size(); ++k) pi[byX[k]] = byW[k];
  return pi;
}

ReorderResult reorder_decompose(const IncrementSeq& x, const IncrementSeq& wPrime) {
  auto pi = rank_permutation(x, wPrime);
  std::vector<double> reordered(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) reordered[i] = wPrime[pi[i]];
  IncrementSeq increments(std::move(reordered));
  GridPath path = path_of(increments);
  return {std::move(path), std::move(increments), std::move(pi)};
}

GridPath bridge_of(const GridPath& path) {
  const std::size_t n = path.n();
  const double endpoint = path.back();
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    out[i] = path[i] - t * endpoint;
  }
  return GridPath(std::move(out));
}

double default_threshold(double n) {
  if (!(n >= 2.0)) throw std::invalid_argument("default_threshold needs n >= 2");
  return std::log(n) / std::sqrt(n);
}

ThresholdResult threshold_decompose(const IncrementSeq& x, double sigma, double a_n) {
  if (!(sigma > 0.0)) throw std::invalid_argument("threshold_decompose needs sigma > 0");
  if (!(a_n > 0.0)) throw std::invalid_argument("threshold_decompose needs a_n > 0");
  std::vector<double> kept(x.n());
  std::vector<bool> mask(x.n());
  for (std::size_t i = 0; i < x.n(); ++i) {
    mask[i] = std::abs(x[i]) <= a_n;
    kept[i] = mask[i] ? x[i] / sigma : 0.0;
  }
  IncrementSeq increments(std::move(kept));
  GridPath path = path_of(increments);
  return {std::move(path), std::move(increments), std::move(mask), a_n};
}

std::string to_string(ThresholdDiagnostic d) {
  switch (d) {
    case ThresholdDiagnostic::ok: return "ok";
    case ThresholdDiagnostic::too_small: return "too_small";
    case ThresholdDiagnostic::too_large: return "too_large";
  }
  return "unknown";
}

ThresholdDiagnostic check_threshold_schedule(double n, double a_n, double sigma, double betaStar) {
  const double logN = std::log(n);
  if (n * a_n * a_n / (sigma * sigma * logN) < 2.0 - betaStar) return ThresholdDiagnostic::too_small;
  if (a_n * std::pow(n, 0.4) > logN) return ThresholdDiagnostic::too_large;
  return ThresholdDiagnostic::ok;
}

GridPath recover_signal(const GridPath& x, double sigma, const GridPath& wBridgeApprox) {
  if (x.n() != wBridgeApprox.n()) throw std::invalid_argument("recover_signal: grid levels differ");
  std::vector<double> out(x.n() + 1);
  for (std::size_t i = 0; i <= x.n(); ++i) out[i] = x[i] - sigma * wBridgeApprox[i];
  return GridPath(std::move(out));
}

GridPath recover_with_drift(const IncrementSeq& x, double sigma, double a_n) {
  return threshold_decompose(x, sigma, a_n).wApprox;
}

std::vector<ReorderResult> multivariate_reorder(std::span<const IncrementSeq> xComponents,
                                                const IncrementSeq& wPrime) {
  if (xComponents.empty()) throw std::invalid_argument("multivariate_reorder needs at least one component");
  for (const auto& c : xComponents) {
    if (c.n() != wPrime.n()) throw std::invalid_argument("multivariate_reorder: component length mismatch");
  }
  std::vector<ReorderResult> out;
  out.reserve(xComponents.size());
  for (const auto& c : xComponents) out.push_back(reorder_decompose(c, wPrime));
  return out;
}

InvariantReport verify_reorder(const IncrementSeq& x, const IncrementSeq& wPrime, const ReorderResult& result) {
  InvariantReport report;
  const std::size_t n = x.n();
  if (wPrime.n() != n || result.increments.n() != n || result.permutation.size() != n || result.wApprox.n() != n) {
    report.fail("length mismatch");
    return report;
  }

  std::vector<char> seen(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = result.permutation[i];
    if (p >= n || seen[p]) {
      report.fail("permutation is not a bijection");
      return report;
    }
    seen[p] = 1;
    if (result.increments[i] != wPrime[p]) {
      report.fail("multiset: increment " + std::to_string(i) + " is not wPrime[pi(i)]");
      return report;
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  for (std::size_t k = 1; k < n; ++k) {
    if (!(result.increments[order[k - 1]] < result.increments[order[k]])) {
      report.fail("rank: order of increments differs from order of x at rank " + std::to_string(k));
      return report;
    }
  }

  if (!(result.wApprox == path_of(result.increments))) report.fail("wApprox is not the cumulative sum");
  return report;
}

InvariantReport verify_threshold(const IncrementSeq& x, double sigma, const ThresholdResult& result) {
  InvariantReport report;
  const std::size_t n = x.n();
  if (result.keptMask.size() != n || result.increments.n() != n || result.wApprox.n() != n) {
    report.fail("length mismatch");
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool keep = !(std::abs(x[i]) > result.threshold);
    if (result.keptMask[i] != keep) {
      report.fail("keptMask wrong at " + std::to_string(i));
      return report;
    }
    const double expected = keep ? x[i] / sigma : 0.0;
    if (result.increments[i] != expected) {
      report.fail("increment wrong at " + std::to_string(i));
      return report;
    }
  }
  if (!(result.wApprox == path_of(result.increments))) report.fail("wApprox is not the cumulative sum");
  return report;
}

InvariantReport verify_bridge(const GridPath& bridge) {
  InvariantReport report;
  if (bridge[0] != 0.0) report.fail("bridge does not start at 0");
  if (bridge.back() != 0.0) report.fail("bridge does not end at 0");
  return report;
}

}  // namespace levysep
