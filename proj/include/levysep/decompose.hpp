#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "levysep/grid.hpp"

namespace levysep {

/// Method I output. `increments` are the reordered W' increments, so that
/// increments[i] == wPrime[permutation[i]] bit for bit, and wApprox is their
/// cumulative sum. permutation is 0-based.
struct ReorderResult {
  GridPath wApprox;
  IncrementSeq increments;
  std::vector<std::size_t> permutation;
};

/// Method II output. increments[i] is x[i] / sigma where kept and 0 otherwise.
struct ThresholdResult {
  GridPath wApprox;
  IncrementSeq increments;
  std::vector<bool> keptMask;
  double threshold;
};

/// pi such that wPrime[pi[i]] has the same rank among wPrime as x[i] among x.
/// Throws DegenerateInput on a tie in either sequence.
std::vector<std::size_t> rank_permutation(const IncrementSeq& x, const IncrementSeq& wPrime);

/// Reorders the increments of an independent Brownian walk to follow the
/// ordering of the observed increments.
ReorderResult reorder_decompose(const IncrementSeq& x, const IncrementSeq& wPrime);

/// out[i] = path[i] - (i/n) path[n]. Both endpoints are exactly 0.
GridPath bridge_of(const GridPath& path);

/// log(n) / sqrt(n), n >= 2.
double default_threshold(double n);

/// Drops increments with |x[i]| > a_n and rescales the rest by 1/sigma.
/// |x[i]| == a_n is kept.
ThresholdResult threshold_decompose(const IncrementSeq& x, double sigma, double a_n);

enum class ThresholdDiagnostic { ok, too_small, too_large };

std::string to_string(ThresholdDiagnostic d);

/// Advisory finite-n check of a threshold against the rate conditions.
///   too_small: n a_n^2 / (sigma^2 log n) < 2 - betaStar
///   too_large: a_n n^0.4 > log n
/// The upper surrogate allows the logarithmic slack of log(n)/sqrt(n) but
/// flags any polynomial excess over n^-0.4.
ThresholdDiagnostic check_threshold_schedule(double n, double a_n, double sigma, double betaStar);

/// out[i] = x[i] - sigma * bridge[i]; approximates Y + sigma W_1 t.
GridPath recover_signal(const GridPath& x, double sigma, const GridPath& wBridgeApprox);

/// The uncompensated Method II path, which approximates W_t + gamma_0 t / sigma
/// when the jump part has bounded variation.
GridPath recover_with_drift(const IncrementSeq& x, double sigma, double a_n);

/// Method I per component, all sharing one W'.
std::vector<ReorderResult> multivariate_reorder(std::span<const IncrementSeq> xComponents,
                                                const IncrementSeq& wPrime);

// --- invariant checks ----------------------------------------------------

struct InvariantReport {
  bool ok = true;
  std::vector<std::string> violations;

  void fail(std::string what) {
    ok = false;
    violations.push_back(std::move(what));
  }
};

/// Checks bijection, multiset preservation, rank preservation and that
/// wApprox is the cumulative sum of the increments. Independent of the
/// argsort used by rank_permutation.
InvariantReport verify_reorder(const IncrementSeq& x, const IncrementSeq& wPrime, const ReorderResult& result);

/// Checks the keptMask definition and the kept/zeroed increments.
InvariantReport verify_threshold(const IncrementSeq& x, double sigma, const ThresholdResult& result);

/// Endpoints exactly 0.
InvariantReport verify_bridge(const GridPath& bridge);

}  // namespace levysep
