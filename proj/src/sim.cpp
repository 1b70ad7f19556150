#include "levysep/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace levysep {

namespace {

void require_level(std::size_t n) {
  if (n == 0) throw std::invalid_argument("grid level n must be >= 1");
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void validate_jump_law(const JumpLaw& law) {
  std::visit(overloaded{
                 [](const NormalJumps& j) {
                   if (!(j.std > 0.0) || !std::isfinite(j.mean)) {
                     throw std::invalid_argument("NormalJumps needs std > 0 and a finite mean");
                   }
                 },
                 [](const FixedSign& j) {
                   if (j.size == 0.0 || !std::isfinite(j.size)) {
                     throw std::invalid_argument("FixedSign jump size must be finite and nonzero");
                   }
                 },
             },
             law);
}

// One CMS draw from S_alpha(1, beta, 0), 1-parametrization.
double cms_draw(double alpha, double beta, RngStream& rng) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double e = rng.exponential();
  if (alpha == 1.0) {
    const double lever = kHalfPi + beta * v;
    return (lever * std::tan(v) - beta * std::log(kHalfPi * e * std::cos(v) / lever)) / kHalfPi;
  }
  const double tanTerm = alpha == 2.0 ? 0.0 : beta * std::tan(kHalfPi * alpha);
  const double shift = std::atan(tanTerm) / alpha;
  const double factor = std::pow(1.0 + tanTerm * tanTerm, 1.0 / (2.0 * alpha));
  const double angle = alpha * (v + shift);
  return factor * std::sin(angle) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos(v - angle) / e, (1.0 - alpha) / alpha);
}

}  // namespace

void validate(const ProcessSpec& spec) {
  std::visit(overloaded{
                 [](const BrownianStd&) {},
                 [](const Bessel3&) {},
                 [](const Zero&) {},
                 [](const Stable& s) {
                   if (!(s.alpha > 0.0 && s.alpha <= 2.0)) throw std::invalid_argument("stable alpha must lie in (0, 2]");
                   if (!(s.beta >= -1.0 && s.beta <= 1.0)) throw std::invalid_argument("stable beta must lie in [-1, 1]");
                   if (!(s.scale > 0.0) || !std::isfinite(s.scale)) throw std::invalid_argument("stable scale must be positive");
                 },
                 [](const VarianceGamma& vg) {
                   if (!std::isfinite(vg.theta)) throw std::invalid_argument("variance gamma theta must be finite");
                   if (!(vg.sigmaVg > 0.0)) throw std::invalid_argument("variance gamma sigmaVg must be positive");
                   if (!(vg.nu > 0.0)) throw std::invalid_argument("variance gamma nu must be positive");
                 },
                 [](const CompoundPoisson& cp) {
                   if (!(cp.rate > 0.0) || !std::isfinite(cp.rate)) throw std::invalid_argument("compound Poisson rate must be positive");
                   validate_jump_law(cp.jumpLaw);
                 },
             },
             spec);
}

void validate(const CompositeSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw std::invalid_argument("sigma must be >= 0");
  validate(spec.signal);
}

std::string model_label(const ProcessSpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianStd&) -> std::string { return "BrownianStd"; },
                        [](const Bessel3&) -> std::string { return "Bessel3"; },
                        [](const Zero&) -> std::string { return "Zero"; },
                        [](const Stable& s) -> std::string {
                          std::ostringstream out;
                          out << s.alpha;
                          return out.str();
                        },
                        [](const VarianceGamma&) -> std::string { return "VarianceGamma"; },
                        [](const CompoundPoisson&) -> std::string { return "CompoundPoisson"; },
                    },
                    spec);
}

IncrementSeq sample_gaussian_increments(std::size_t n, RngStream& rng) {
  require_level(n);
  const double sd = std::sqrt(1.0 / static_cast<double>(n));
  std::vector<double> deltas(n);
  for (auto& d : deltas) d = sd * rng.normal();
  return IncrementSeq(std::move(deltas));
}

std::array<IncrementSeq, 3> sample_brownian3_increments(std::size_t n, RngStream& rng) {
  require_level(n);
  auto a = sample_gaussian_increments(n, rng);
  auto b = sample_gaussian_increments(n, rng);
  auto c = sample_gaussian_increments(n, rng);
  return {std::move(a), std::move(b), std::move(c)};
}

GridPath bessel3_from_components(const std::array<IncrementSeq, 3>& components) {
  const std::size_t n = components[0].n();
  if (components[1].n() != n || components[2].n() != n) {
    throw std::invalid_argument("Bessel components must share a grid level");
  }
  std::vector<double> values(n + 1, 0.0);
  double b1 = 0.0, b2 = 0.0, b3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    b1 += components[0][i];
    b2 += components[1][i];
    b3 += components[2][i];
    values[i + 1] = std::sqrt(b1 * b1 + b2 * b2 + b3 * b3);
  }
  return GridPath(std::move(values));
}

IncrementSeq bessel3_increments(const std::array<IncrementSeq, 3>& components) {
  const std::size_t n = components[0].n();
  if (components[1].n() != n || components[2].n() != n) {
    throw std::invalid_argument("Bessel components must share a grid level");
  }
  std::vector<double> deltas(n);
  double b[3] = {0.0, 0.0, 0.0};
  double r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // |b + d| - |b| = (2 b.d + |d|^2) / (|b + d| + |b|), without cancellation.
    double dot = 0.0, dd = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = components[k][i];
      dot += b[k] * d;
      dd += d * d;
      b[k] += d;
    }
    const double next = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    const double denom = next + r;
    deltas[i] = denom > 0.0 ? (2.0 * dot + dd) / denom : 0.0;
    r = next;
  }
  return IncrementSeq(std::move(deltas));
}

GridPath sample_bessel3_path(std::size_t n, RngStream& rng) {
  return bessel3_from_components(sample_brownian3_increments(n, rng));
}

IncrementSeq sample_stable_increments(std::size_t n, double alpha, double beta, double scale,
                                      RngStream& rng) {
  require_level(n);
  validate(ProcessSpec{Stable{alpha, beta, scale}});
  // alpha == 1 keeps the zero-shift CMS output; strict stability fails there when beta != 0.
  const double stepScale = scale * std::pow(1.0 / static_cast<double>(n), 1.0 / alpha);
  std::vector<double> deltas(n);
  for (auto& d : deltas) d = stepScale * cms_draw(alpha, beta, rng);
  return IncrementSeq(std::move(deltas));
}

IncrementSeq sample_variance_gamma_increments(std::size_t n, double theta, double sigmaVg, double nu,
                                              RngStream& rng) {
  require_level(n);
  validate(ProcessSpec{VarianceGamma{theta, sigmaVg, nu}});
  const double shape = (1.0 / static_cast<double>(n)) / nu;
  const double logScale = std::log(nu);
  std::vector<double> deltas(n);
  for (auto& d : deltas) {
    const double logG = rng.log_gamma_variate(shape) + logScale;
    const double z = rng.normal();
    d = theta * std::exp(logG) + sigmaVg * std::exp(0.5 * logG) * z;
  }
  return IncrementSeq(std::move(deltas));
}

CompoundPoissonSample sample_compound_poisson(std::size_t n, double rate, const JumpLaw& jumpLaw,
                                              RngStream& rng) {
  require_level(n);
  validate(ProcessSpec{CompoundPoisson{rate, jumpLaw}});
  const std::uint64_t count = rng.poisson(rate);

  std::vector<std::pair<double, double>> jumps;
  for (;;) {
    jumps.clear();
    for (std::uint64_t k = 0; k < count; ++k) {
      const double t = rng.uniform();
      double size = 0.0;
      do {
        size = std::visit(overloaded{
                              [&](const NormalJumps& j) { return j.mean + j.std * rng.normal(); },
                              [](const FixedSign& j) { return j.size; },
                          },
                          jumpLaw);
      } while (size == 0.0);
      jumps.emplace_back(t, size);
    }
    std::sort(jumps.begin(), jumps.end());
    const bool tied = std::adjacent_find(jumps.begin(), jumps.end(), [](const auto& a, const auto& b) {
                        return a.first == b.first;
                      }) != jumps.end();
    if (!tied) break;
  }

  JumpRecord record;
  std::vector<double> deltas(n, 0.0);
  const double level = static_cast<double>(n);
  for (const auto& [t, size] : jumps) {
    auto cell = static_cast<std::size_t>(std::ceil(t * level));
    cell = std::clamp<std::size_t>(cell, 1, n);
    deltas[cell - 1] += size;
    record.times.push_back(t);
    record.sizes.push_back(size);
  }
  return {IncrementSeq(std::move(deltas)), std::move(record)};
}

SignalSample sample_process(const ProcessSpec& spec, std::size_t n, RngStream& rng) {
  validate(spec);
  return std::visit(overloaded{
                        [&](const BrownianStd&) { return SignalSample{sample_gaussian_increments(n, rng), std::nullopt}; },
                        [&](const Bessel3&) {
                          return SignalSample{bessel3_increments(sample_brownian3_increments(n, rng)), std::nullopt};
                        },
                        [&](const Zero&) {
                          require_level(n);
                          return SignalSample{IncrementSeq(std::vector<double>(n, 0.0)), std::nullopt};
                        },
                        [&](const Stable& s) {
                          return SignalSample{sample_stable_increments(n, s.alpha, s.beta, s.scale, rng), std::nullopt};
                        },
                        [&](const VarianceGamma& vg) {
                          return SignalSample{sample_variance_gamma_increments(n, vg.theta, vg.sigmaVg, vg.nu, rng),
                                              std::nullopt};
                        },
                        [&](const CompoundPoisson& cp) {
                          auto sample = sample_compound_poisson(n, cp.rate, cp.jumpLaw, rng);
                          return SignalSample{std::move(sample.increments), std::move(sample.jumps)};
                        },
                    },
                    spec);
}

IncrementSeq compose(double sigma, const IncrementSeq& w, const IncrementSeq& y) {
  if (w.n() != y.n()) throw std::invalid_argument("compose: increment sequences differ in length");
  std::vector<double> deltas(w.n());
  for (std::size_t i = 0; i < w.n(); ++i) deltas[i] = sigma * w[i] + y[i];
  return IncrementSeq(std::move(deltas));
}

CompositeSample simulate_composite(const CompositeSpec& spec, std::size_t n, std::uint64_t masterSeed,
                                   std::uint64_t replication) {
  validate(spec);
  require_level(n);
  RngStream wStream(masterSeed, derive_stream_id(replication, Component::Brownian));
  RngStream yStream(masterSeed, derive_stream_id(replication, Component::Signal));

  std::optional<GridPath> w;
  std::optional<IncrementSeq> dw;
  if (spec.brownianLaw == BrownianLaw::Bessel3) {
    const auto components = sample_brownian3_increments(n, wStream);
    w.emplace(bessel3_from_components(components));
    dw.emplace(bessel3_increments(components));
  } else {
    dw.emplace(sample_gaussian_increments(n, wStream));
    w.emplace(path_of(*dw));
  }
  SignalSample signal = sample_process(spec.signal, n, yStream);
  IncrementSeq dx = compose(spec.sigma, *dw, signal.increments);
  GridPath x = path_of(dx);
  return {std::move(*w), path_of(signal.increments), std::move(x), std::move(dx), std::move(signal.jumps)};
}

}  // namespace levysep
