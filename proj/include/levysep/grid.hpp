#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace levysep {

/// Raised when the input is well-formed but degenerate, e.g. tied increments.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values of a process on the uniform grid {i/n : i = 0..n}; values[0] == 0.
class GridPath {
 public:
  explicit GridPath(std::vector<double> values);

  /// The constant-zero path at level n.
  static GridPath zero(std::size_t n);

  std::size_t n() const noexcept { return values_.size() - 1; }
  std::span<const double> values() const& noexcept { return values_; }
  std::vector<double> values() && { return std::move(values_); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double back() const noexcept { return values_.back(); }

  bool operator==(const GridPath&) const = default;

 private:
  std::vector<double> values_;
};

/// The n increments of a grid path, deltas[i-1] = X(i/n) - X((i-1)/n).
class IncrementSeq {
 public:
  explicit IncrementSeq(std::vector<double> deltas);

  std::size_t n() const noexcept { return deltas_.size(); }
  std::span<const double> deltas() const& noexcept { return deltas_; }
  std::vector<double> deltas() && { return std::move(deltas_); }
  double operator[](std::size_t i) const noexcept { return deltas_[i]; }

  bool operator==(const IncrementSeq&) const = default;

 private:
  std::vector<double> deltas_;
};

/// Cumulative sum prefixed with 0.
GridPath path_of(const IncrementSeq& increments);

IncrementSeq increments_of(const GridPath& path);

/// Subsamples a level-N path to level n: out[i] = path[i * N / n]. n must divide N.
GridPath coarsen(const GridPath& path, std::size_t n);

/// Level-n increments as block sums of level-N increments. Prefer this over
/// increments_of(coarsen(path_of(x), n)): differencing an accumulated path loses
/// the small increments that follow a large jump.
IncrementSeq coarsen(const IncrementSeq& increments, std::size_t n);

/// FNV-1a over the bit patterns of the values; used to prove two runs saw the same path.
std::uint64_t path_checksum(const GridPath& path) noexcept;

}  // namespace levysep
