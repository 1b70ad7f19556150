#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "levysep/rng.hpp"
#include "oracles.hpp"

using namespace levysep;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors published with the Random123 library.
  using Ctr = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Ctr{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Ctr{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Ctr{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are pure functions of seed and stream id") {
  RngStream a(7, 11), b(7, 11), c(7, 12), d(8, 11);
  std::vector<std::uint64_t> va, vb, vc, vd;
  for (int i = 0; i < 64; ++i) {
    va.push_back(a.next_u64());
    vb.push_back(b.next_u64());
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}

TEST_CASE("stream ids differ across replications and components") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t rep = 0; rep < 1000; ++rep) {
    for (auto tag : {Component::Brownian, Component::Signal, Component::Independent, Component::Extra}) {
      ids.insert(derive_stream_id(rep, tag));
    }
  }
  CHECK(ids.size() == 4000);
}

TEST_CASE("uniforms lie strictly inside (0, 1) and are uniform") {
  RngStream rng(1, 2);
  std::vector<double> u(100000);
  for (auto& x : u) {
    x = rng.uniform();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  CHECK(oracle::ks_statistic(u, [](double x) { return x; }) < oracle::kKsCritical1e3);
}

TEST_CASE("normals pass KS against N(0,1)") {
  RngStream rng(3, 4);
  std::vector<double> z(100000);
  for (auto& x : z) x = rng.normal();
  CHECK(oracle::ks_statistic(z, [](double x) { return oracle::normal_cdf(x); }) < oracle::kKsCritical1e3);
  const auto m = oracle::moments(z);
  CHECK(std::abs(m.mean) < 3 * m.se_mean);
  CHECK(std::abs(m.variance - 1.0) < 3 * oracle::se_variance(z));
}

TEST_CASE("exponentials pass KS against Exp(1)") {
  RngStream rng(5, 6);
  std::vector<double> e(100000);
  for (auto& x : e) x = rng.exponential();
  CHECK(oracle::ks_statistic(e, [](double x) { return 1.0 - std::exp(-x); }) < oracle::kKsCritical1e3);
}

TEST_CASE("gamma variates have mean and variance equal to the shape") {
  for (double shape : {0.004, 0.3, 1.0, 2.5, 40.0}) {
    CAPTURE(shape);
    RngStream rng(9, static_cast<std::uint64_t>(shape * 1000));
    std::vector<double> g(200000);
    for (auto& x : g) x = std::exp(rng.log_gamma_variate(shape));
    const auto m = oracle::moments(g);
    CHECK(std::abs(m.mean - shape) < 3.5 * m.se_mean);
    CHECK(std::abs(m.variance - shape) < 3.5 * oracle::se_variance(g));
  }
}

TEST_CASE("tiny gamma shapes stay finite in log space") {
  RngStream rng(10, 10);
  for (int i = 0; i < 1000; ++i) {
    const double lg = rng.log_gamma_variate(1e-6);
    REQUIRE(std::isfinite(lg));
  }
}

TEST_CASE("poisson mean and variance, including chunked means") {
  for (double mean : {0.5, 3.0, 75.0}) {
    CAPTURE(mean);
    RngStream rng(12, static_cast<std::uint64_t>(mean * 10));
    std::vector<double> k(100000);
    for (auto& x : k) x = static_cast<double>(rng.poisson(mean));
    const auto m = oracle::moments(k);
    CHECK(std::abs(m.mean - mean) < 3.5 * m.se_mean);
    CHECK(std::abs(m.variance - mean) < 3.5 * oracle::se_variance(k));
  }
  RngStream rng(1, 1);
  CHECK(rng.poisson(0.0) == 0);
}
