#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "levysep/report_io.hpp"
#include "levysep/sim.hpp"
#include "oracles.hpp"

using namespace levysep;

namespace {

IncrementSeq read_golden(const std::string& name) {
  std::ifstream in(std::string(LEVYSEP_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing golden file " << name);
  return read_delta_csv(in);
}

double sum(const IncrementSeq& d) {
  double s = 0.0;
  for (double x : d.deltas()) s += x;
  return s;
}

}  // namespace

TEST_SUITE("gaussian") {
  TEST_CASE("n = 0 is rejected") {
    RngStream rng(0, 0);
    CHECK_THROWS_AS(sample_gaussian_increments(0, rng), std::invalid_argument);
  }

  TEST_CASE("single increment has unit variance across seeds") {
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
      RngStream rng(seed, 0);
      v.push_back(sample_gaussian_increments(1, rng)[0]);
    }
    const auto m = oracle::moments(v);
    CHECK(std::abs(m.variance - 1.0) < 3 * oracle::se_variance(v));
  }

  TEST_CASE("endpoint of a level-4 walk is N(0,1)") {
    RngStream rng(17, 3);
    std::vector<double> ends(100000);
    for (auto& e : ends) e = sum(sample_gaussian_increments(4, rng));
    CHECK(oracle::ks_statistic(ends, [](double x) { return oracle::normal_cdf(x); }) < oracle::kKsCritical1e3);
  }

  TEST_CASE("golden output for seed 42, stream 0, n = 8") {
    RngStream rng(42, 0);
    CHECK(sample_gaussian_increments(8, rng) == read_golden("golden_gaussian_seed42_n8.csv"));
  }
}

TEST_SUITE("bessel3") {
  TEST_CASE("starts at zero and stays nonnegative") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      RngStream rng(seed, 5);
      const GridPath p = sample_bessel3_path(200, rng);
      CHECK(p[0] == 0.0);
      for (double v : p.values()) REQUIRE(v >= 0.0);
    }
    RngStream rng(1, 1);
    CHECK_THROWS_AS(sample_bessel3_path(0, rng), std::invalid_argument);
  }

  TEST_CASE("value at time 1 has the Maxwell mean") {
    RngStream rng(23, 1);
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_bessel3_path(1, rng)[1];
    const auto m = oracle::moments(v);
    const double maxwell = 2.0 * std::sqrt(2.0 / std::numbers::pi);
    CHECK(std::abs(m.mean - maxwell) < 3 * m.se_mean);
  }

  TEST_CASE("components are Brownian increments") {
    RngStream rng(31, 2);
    const auto comps = sample_brownian3_increments(30000, rng);
    for (const auto& c : comps) {
      std::vector<double> v(c.deltas().begin(), c.deltas().end());
      CHECK(oracle::ks_statistic(v, [](double x) { return oracle::normal_cdf(x, 1.0 / 30000.0); }) <
            oracle::kKsCritical1e3);
    }
  }

  TEST_CASE("increments agree with differences of the path") {
    RngStream rng(8, 8);
    const auto comps = sample_brownian3_increments(5000, rng);
    const GridPath p = bessel3_from_components(comps);
    const IncrementSeq direct = bessel3_increments(comps);
    const IncrementSeq diff = increments_of(p);
    for (std::size_t i = 0; i < direct.n(); ++i) CHECK(std::abs(direct[i] - diff[i]) < 1e-14);
  }

  TEST_CASE("golden increments for seed 42, stream 0, n = 4") {
    RngStream rng(42, 0);
    CHECK(bessel3_increments(sample_brownian3_increments(4, rng)) == read_golden("golden_bessel3_seed42_n4.csv"));
  }
}

TEST_SUITE("stable") {
  TEST_CASE("parameter validation") {
    RngStream rng(0, 0);
    CHECK_THROWS_AS(sample_stable_increments(10, 0.0, 0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increments(10, 2.1, 0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increments(10, 1.5, 1.1, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increments(10, 1.5, 0.0, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_stable_increments(0, 1.5, 0.0, 1.0, rng), std::invalid_argument);
    CHECK_NOTHROW(sample_stable_increments(10, 2.0, 0.9, 1.0, rng));
  }

  TEST_CASE("alpha = 2 is Gaussian with variance 2 scale^2") {
    RngStream rng(2, 2);
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_stable_increments(1, 2.0, 0.0, 1.0, rng)[0];
    const auto m = oracle::moments(v);
    CHECK(std::abs(m.variance - 2.0) < 3 * oracle::se_variance(v));

    const double scale = 0.7;
    const std::size_t n = 10;
    const IncrementSeq d = sample_stable_increments(100000, 2.0, 0.3, scale, rng);
    std::vector<double> w(d.deltas().begin(), d.deltas().end());
    // Each of the 10^5 draws is one step at level 10^5; rescale to level n.
    for (auto& x : w) x *= std::sqrt(100000.0 / static_cast<double>(n));
    const double var = 2.0 * scale * scale / static_cast<double>(n);
    CHECK(oracle::ks_statistic(w, [&](double x) { return oracle::normal_cdf(x, var); }) < oracle::kKsCritical1e3);
  }

  TEST_CASE("alpha = 1, beta = 0 is standard Cauchy") {
    RngStream rng(3, 3);
    std::vector<double> v(100000);
    std::size_t beyond = 0, positive = 0;
    for (auto& x : v) {
      x = sample_stable_increments(1, 1.0, 0.0, 1.0, rng)[0];
      beyond += std::abs(x) > 1.0;
      positive += x > 0.0;
    }
    const double m = static_cast<double>(v.size());
    const double se = std::sqrt(0.25 / m);
    CHECK(std::abs(static_cast<double>(beyond) / m - 0.5) < 3 * se);
    CHECK(std::abs(static_cast<double>(positive) / m - 0.5) < 3 * se);
    CHECK(oracle::ks_statistic(v, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; }) <
          oracle::kKsCritical1e3);
  }

  TEST_CASE("Hill estimate of the tail index at alpha = 1.2") {
    RngStream rng(4, 4);
    const IncrementSeq d = sample_stable_increments(1000000, 1.2, -0.5, 1.0, rng);
    const double hill = oracle::hill_estimator(std::vector<double>(d.deltas().begin(), d.deltas().end()), 2000);
    CHECK(hill >= 1.05);
    CHECK(hill <= 1.35);
  }

  TEST_CASE("strict stability: level-n sums match a unit draw") {
    for (double alpha : {0.6, 1.5}) {
      CAPTURE(alpha);
      RngStream a(5, 5), b(6, 6);
      std::vector<double> unit(20000), summed(20000);
      for (auto& x : unit) x = sample_stable_increments(1, alpha, 0.5, 1.0, a)[0];
      for (auto& x : summed) x = sum(sample_stable_increments(10, alpha, 0.5, 1.0, b));
      CHECK(oracle::ks_two_sample(unit, summed) < oracle::kKsCritical1e3);
    }
  }
}

TEST_SUITE("variance gamma") {
  TEST_CASE("validation") {
    RngStream rng(0, 0);
    CHECK_THROWS_AS(sample_variance_gamma_increments(4, 0.0, 0.0, 0.25, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_variance_gamma_increments(4, 0.0, 0.3, 0.0, rng), std::invalid_argument);
  }

  TEST_CASE("small nu approaches Brownian motion") {
    RngStream rng(7, 7);
    std::vector<double> v(100000);
    for (auto& x : v) x = sample_variance_gamma_increments(1, 0.0, 1.0, 0.01, rng)[0];
    CHECK(std::abs(oracle::moments(v).variance - 1.0) < 0.05);
  }

  TEST_CASE("increment mean is theta / n") {
    RngStream rng(8, 8);
    const std::size_t n = 4;
    std::vector<double> v;
    for (int k = 0; k < 250000; ++k) {
      const IncrementSeq d = sample_variance_gamma_increments(n, 0.3, 0.2, 0.5, rng);
      v.insert(v.end(), d.deltas().begin(), d.deltas().end());
    }
    const auto m = oracle::moments(v);
    CHECK(std::abs(m.mean - 0.3 / static_cast<double>(n)) < 3 * m.se_mean);
  }

  TEST_CASE("default parameters give variance sigma^2 + theta^2 nu at t = 1") {
    RngStream rng(9, 9);
    const VarianceGamma vg;
    std::vector<double> v(1000000);
    for (auto& x : v) x = sample_variance_gamma_increments(1, vg.theta, vg.sigmaVg, vg.nu, rng)[0];
    const double expected = vg.sigmaVg * vg.sigmaVg + vg.theta * vg.theta * vg.nu;
    CHECK(expected == doctest::Approx(0.0925));
    CHECK(std::abs(oracle::moments(v).variance - expected) < 3 * oracle::se_variance(v));
  }
}

TEST_SUITE("compound poisson") {
  TEST_CASE("unit jumps are conserved and land in the right cells") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      RngStream rng(seed, 9);
      const std::size_t n = 50;
      const auto s = sample_compound_poisson(n, 3.0, FixedSign{1.0}, rng);
      CHECK(sum(s.increments) == static_cast<double>(s.jumps.sizes.size()));
      std::vector<double> expected(n, 0.0);
      for (std::size_t k = 0; k < s.jumps.times.size(); ++k) {
        const double t = s.jumps.times[k];
        REQUIRE(t > 0.0);
        REQUIRE(t < 1.0);
        if (k > 0) REQUIRE(s.jumps.times[k - 1] < t);
        std::size_t cell = 1;
        while (static_cast<double>(cell) / static_cast<double>(n) < t) ++cell;
        expected[cell - 1] += s.jumps.sizes[k];
      }
      CHECK(s.increments == IncrementSeq(expected));
    }
  }

  TEST_CASE("no realized jumps gives zero increments") {
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 200 && !seen; ++seed) {
      RngStream rng(seed, 10);
      const auto s = sample_compound_poisson(20, 3.0, NormalJumps{0.0, 1.0}, rng);
      if (s.jumps.times.empty()) {
        seen = true;
        CHECK(s.increments == IncrementSeq(std::vector<double>(20, 0.0)));
      }
    }
    CHECK(seen);
  }

  TEST_CASE("jump count has mean rate") {
    RngStream rng(11, 11);
    std::vector<double> counts(100000);
    for (auto& c : counts) c = static_cast<double>(sample_compound_poisson(4, 3.0, FixedSign{1.0}, rng).jumps.sizes.size());
    const auto m = oracle::moments(counts);
    CHECK(std::abs(m.mean - 3.0) < 3 * m.se_mean);
  }

  TEST_CASE("normal jump sizes are nonzero") {
    RngStream rng(12, 12);
    for (int k = 0; k < 1000; ++k) {
      for (double s : sample_compound_poisson(8, 3.0, NormalJumps{0.0, 1.0}, rng).jumps.sizes) REQUIRE(s != 0.0);
    }
  }

  TEST_CASE("validation") {
    RngStream rng(0, 0);
    CHECK_THROWS_AS(sample_compound_poisson(4, 0.0, FixedSign{1.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_compound_poisson(4, 1.0, FixedSign{0.0}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_compound_poisson(4, 1.0, NormalJumps{0.0, 0.0}, rng), std::invalid_argument);
  }
}

TEST_SUITE("compose") {
  TEST_CASE("examples") {
    const IncrementSeq w(std::vector<double>{0.5, -1.0, 2.0, 0.25, -0.75});
    const IncrementSeq y(std::vector<double>{1.0, 3.0, -2.0, 0.125, 4.0});
    CHECK(compose(0.0, w, y) == y);
    CHECK(compose(2.0, w, IncrementSeq(std::vector<double>(5, 0.0))) ==
          IncrementSeq(std::vector<double>{1.0, -2.0, 4.0, 0.5, -1.5}));
    const IncrementSeq s = compose(1.0, w, y);
    for (std::size_t i = 0; i < 5; ++i) CHECK(s[i] == w[i] + y[i]);
    CHECK_THROWS_AS(compose(1.0, w, IncrementSeq(std::vector<double>{1.0})), std::invalid_argument);
  }
}

TEST_SUITE("composite") {
  TEST_CASE("simulation is deterministic and consistent") {
    const CompositeSpec spec{1.0, BrownianLaw::Bessel3, Stable{1.2, -0.5, 1.0}};
    const CompositeSample a = simulate_composite(spec, 1000, 5, 3);
    const CompositeSample b = simulate_composite(spec, 1000, 5, 3);
    CHECK(a.x == b.x);
    CHECK(a.xIncrements == b.xIncrements);
    CHECK(path_checksum(a.x) != path_checksum(simulate_composite(spec, 1000, 5, 4).x));
    CHECK(a.x == path_of(a.xIncrements));
    for (std::size_t i = 0; i <= 1000; ++i) CHECK(std::abs(a.x[i] - (a.w[i] + a.y[i])) < 1e-9 * (1 + std::abs(a.x[i])));
  }

  TEST_CASE("model labels") {
    CHECK(model_label(Stable{0.2, 0.5, 1.0}) == "0.2");
    CHECK(model_label(Stable{1.99, 0.5, 1.0}) == "1.99");
    CHECK(model_label(Zero{}) == "Zero");
    CHECK(model_label(CompoundPoisson{}) == "CompoundPoisson");
  }

  TEST_CASE("negative sigma is rejected") {
    CHECK_THROWS_AS(validate(CompositeSpec{-1.0, BrownianLaw::BrownianStd, Zero{}}), std::invalid_argument);
  }
}
