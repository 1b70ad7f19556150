#include "levysep/grid.hpp"

#include <bit>
#include <string>

namespace levysep {

GridPath::GridPath(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("GridPath needs at least two grid values");
  if (values_.front() != 0.0) throw std::invalid_argument("GridPath must start at 0");
}

GridPath GridPath::zero(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid level must be positive");
  return GridPath(std::vector<double>(n + 1, 0.0));
}

IncrementSeq::IncrementSeq(std::vector<double> deltas) : deltas_(std::move(deltas)) {
  if (deltas_.empty()) throw std::invalid_argument("IncrementSeq needs at least one increment");
}

GridPath path_of(const IncrementSeq& increments) {
  std::vector<double> values(increments.n() + 1);
  values[0] = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < increments.n(); ++i) {
    sum += increments[i];
    values[i + 1] = sum;
  }
  return GridPath(std::move(values));
}

IncrementSeq increments_of(const GridPath& path) {
  std::vector<double> deltas(path.n());
  for (std::size_t i = 0; i < path.n(); ++i) deltas[i] = path[i + 1] - path[i];
  return IncrementSeq(std::move(deltas));
}

GridPath coarsen(const GridPath& path, std::size_t n) {
  const std::size_t fine = path.n();
  if (n == 0 || fine % n != 0) {
    throw std::invalid_argument("coarsen: level " + std::to_string(n) +
                                " does not divide " + std::to_string(fine));
  }
  const std::size_t stride = fine / n;
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = path[i * stride];
  return GridPath(std::move(values));
}

IncrementSeq coarsen(const IncrementSeq& increments, std::size_t n) {
  const std::size_t fine = increments.n();
  if (n == 0 || fine % n != 0) {
    throw std::invalid_argument("coarsen: level " + std::to_string(n) +
                                " does not divide " + std::to_string(fine));
  }
  const std::size_t stride = fine / n;
  std::vector<double> deltas(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double sum = 0.0;
    for (std::size_t j = k * stride; j < (k + 1) * stride; ++j) sum += increments[j];
    deltas[k] = sum;
  }
  return IncrementSeq(std::move(deltas));
}

std::uint64_t path_checksum(const GridPath& path) noexcept {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (double v : path.values()) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xFFu;
      hash *= 0x100000001B3ull;
    }
  }
  return hash;
}

}  // namespace levysep
