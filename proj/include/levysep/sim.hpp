#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levysep/grid.hpp"
#include "levysep/rng.hpp"

namespace levysep {

// --- process descriptions -------------------------------------------------

struct BrownianStd {};
struct Bessel3 {};
struct Zero {};

/// Strictly alpha-stable law in the 1-parametrization, unit time scale `scale`.
/// alpha == 2 is the Gaussian with variance 2 * scale^2 whatever beta is.
struct Stable {
  double alpha = 1.0;
  double beta = 0.0;
  double scale = 1.0;
};

/// Brownian motion with drift theta and volatility sigmaVg, time-changed by a
/// gamma subordinator of unit mean rate and variance rate nu.
struct VarianceGamma {
  double theta = -0.1;
  double sigmaVg = 0.3;
  double nu = 0.25;
};

struct NormalJumps {
  double mean = 0.0;
  double std = 1.0;
};

struct FixedSign {
  double size = 1.0;
};

using JumpLaw = std::variant<NormalJumps, FixedSign>;

struct CompoundPoisson {
  double rate = 3.0;
  JumpLaw jumpLaw = FixedSign{};
};

using ProcessSpec = std::variant<BrownianStd, Bessel3, Stable, VarianceGamma, CompoundPoisson, Zero>;

enum class BrownianLaw { BrownianStd, Bessel3 };

/// X = signal + sigma * W.
struct CompositeSpec {
  double sigma = 1.0;
  BrownianLaw brownianLaw = BrownianLaw::BrownianStd;
  ProcessSpec signal = Zero{};
};

/// Throws std::invalid_argument when a parameter is out of range.
void validate(const ProcessSpec& spec);
void validate(const CompositeSpec& spec);

/// Short label for reports: the alpha value for stable laws, the model name otherwise.
std::string model_label(const ProcessSpec& spec);

/// Jump times in (0, 1), strictly increasing, with nonzero sizes.
struct JumpRecord {
  std::vector<double> times;
  std::vector<double> sizes;
};

// --- samplers ---------------------------------------------------------------

IncrementSeq sample_gaussian_increments(std::size_t n, RngStream& rng);

/// Three independent Brownian increment sequences at level n, drawn in
/// component-major order from one stream.
std::array<IncrementSeq, 3> sample_brownian3_increments(std::size_t n, RngStream& rng);

/// Euclidean norm of the cumulative 3-d walk.
GridPath bessel3_from_components(const std::array<IncrementSeq, 3>& components);

GridPath sample_bessel3_path(std::size_t n, RngStream& rng);

/// Increments of the Bessel path computed without differencing the path, so
/// they keep full relative precision. Agrees with increments_of(bessel3_from_components)
/// up to rounding.
IncrementSeq bessel3_increments(const std::array<IncrementSeq, 3>& components);

/// Chambers-Mallows-Stuck draws at time step 1/n.
IncrementSeq sample_stable_increments(std::size_t n, double alpha, double beta, double scale,
                                      RngStream& rng);

IncrementSeq sample_variance_gamma_increments(std::size_t n, double theta, double sigmaVg, double nu,
                                              RngStream& rng);

struct CompoundPoissonSample {
  IncrementSeq increments;
  JumpRecord jumps;
};

/// A jump at time t lands in increment ceil(t n), so a jump exactly at i/n belongs to increment i.
CompoundPoissonSample sample_compound_poisson(std::size_t n, double rate, const JumpLaw& jumpLaw,
                                              RngStream& rng);

struct SignalSample {
  IncrementSeq increments;
  std::optional<JumpRecord> jumps;
};

/// Dispatches on the variant. Bessel3 returns the increments of the Bessel path.
SignalSample sample_process(const ProcessSpec& spec, std::size_t n, RngStream& rng);

/// deltas[i] = sigma * w[i] + y[i].
IncrementSeq compose(double sigma, const IncrementSeq& w, const IncrementSeq& y);

/// One simulated realization of X = Y + sigma W on a single grid.
struct CompositeSample {
  GridPath w;
  GridPath y;
  GridPath x;
  IncrementSeq xIncrements;  // sigma dW + dY, before accumulation
  std::optional<JumpRecord> jumps;
};

/// Samples W and Y from streams derived from (masterSeed, replication).
/// xIncrements is built from the sampled increments of W, not from differences of w.
CompositeSample simulate_composite(const CompositeSpec& spec, std::size_t n, std::uint64_t masterSeed,
                                   std::uint64_t replication);

}  // namespace levysep
