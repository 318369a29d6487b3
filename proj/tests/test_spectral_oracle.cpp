#include <doctest.h>

#include <cmath>

#include "qpfe/chebyshev_bessel.hpp"
#include "qpfe/errors.hpp"
#include "qpfe/spectral_oracle.hpp"
#include "test_helpers.hpp"

using namespace qpfe;
using qpfe::test::markov5;
using qpfe::test::single_node;

TEST_CASE("spectrum of the single-node model") {
  const SpectrumView v = spectrum(normalize(single_node()));
  REQUIRE(v.eigenvalues.size() == 2);
  CHECK(v.eigenvalues[0] == 0.0);
  CHECK(v.eigenvalues[1] == -1.0);
}

TEST_CASE("spectrum of the 5-node example") {
  const SpectrumView v = spectrum(normalize(markov5()));
  REQUIRE(v.eigenvalues.size() == 32);
  CHECK(v.eigenvalues[0] == 0.0);
  CHECK(v.eigenvalues[31] == doctest::Approx(-0.10).epsilon(1e-12));
  for (int x = 0; x < 32; ++x) {
    CHECK(v.eigenvalues[x] <= 1.0 + 1e-12);
    CHECK(v.eigenvalues[x] >= -1.0 - 1e-12);
  }
}

TEST_CASE("spectrum requires a normalized model and respects the cap") {
  CHECK_THROWS(spectrum(single_node(2.0)));
  CHECK_THROWS_AS(spectrum(random_model(5, 1), 4), CapacityError);
}

TEST_CASE("exact_partition") {
  SUBCASE("beta = 0 counts configurations") {
    CHECK(exact_partition(random_model(3, 9), 0.0) == 8.0);
  }
  SUBCASE("single node, beta = 1, equals 1 + e") {
    CHECK(exact_partition(normalize(single_node()), 1.0) ==
          doctest::Approx(3.7182818284590452).epsilon(1e-15));
  }
  SUBCASE("5-node example golden value") {
    // Frozen from brute-force enumeration over the 32 configurations.
    CHECK(exact_partition(normalize(markov5()), 1.0) ==
          doctest::Approx(32.571814367181084).epsilon(1e-13));
  }
  SUBCASE("scale folds back to the original model") {
    const MrfModel scaled = single_node(2.0);  // original: theta00 = 2
    CHECK(exact_partition(normalize(scaled), 1.0) ==
          doctest::Approx(1.0 + std::exp(2.0)).epsilon(1e-14));
  }
}

TEST_CASE("exact_chi") {
  const MrfModel m = normalize(single_node());
  CHECK(exact_chi(m, 0) == 2.0);
  CHECK(exact_chi(markov5(), 0) == 32.0);
  CHECK(exact_chi(m, 1) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(exact_chi(m, 2) == doctest::Approx(0.0));
}

TEST_CASE("exact_chi at k = 1 is minus the energy sum") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MrfModel m = random_model(5, seed, 0.7);
    double esum = 0.0;
    for (std::uint64_t x = 0; x < 32; ++x) esum += energy(m, x);
    CHECK(exact_chi(m, 1) == doctest::Approx(-esum).epsilon(1e-12));
  }
}

TEST_CASE("exact_sk_trace") {
  const MrfModel m = normalize(single_node());
  SUBCASE("K = 0 is the Bessel prefactor") {
    CHECK(exact_sk_trace(m, 1.0, 0) ==
          doctest::Approx(2.0 * bessel_i(0, 1.0)).epsilon(1e-15));
  }
  SUBCASE("worked K = 3 value") {
    CHECK(exact_sk_trace(m, 1.0, 3) ==
          doctest::Approx(3.7067868133376507).epsilon(1e-13));
  }
  SUBCASE("K = 30 recovers the partition function") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (int n = 1; n <= 4; ++n) {
        const MrfModel r = random_model(n, seed);
        CHECK(exact_sk_trace(r, 1.0, 30) ==
              doctest::Approx(exact_partition(r, 1.0)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("truncation_error") {
  const MrfModel m = normalize(single_node());
  SUBCASE("vanishes for large K") {
    CHECK(truncation_error(m, 1.0, 30) < 1e-12);
    CHECK(truncation_error(markov5(), 1.0, 30) < 1e-12);
  }
  SUBCASE("worked K = 3 value dominates the trace difference") {
    const double err = truncation_error(m, 1.0, 3);
    const double diff =
        std::abs(exact_sk_trace(m, 1.0, 3) - exact_partition(m, 1.0));
    CHECK(err == doctest::Approx(0.011495015121).epsilon(1e-8));
    CHECK(err >= diff - 1e-15);
  }
  SUBCASE("monotone non-increasing from K = 1 onward") {
    // Not monotone across K = 0 -> 1 in general (the signed partial sums can
    // cancel); from K = 1 the removed Bessel term dominates the remainder.
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const MrfModel r = random_model(3, seed);
      double prev = truncation_error(r, 1.0, 1);
      for (int K = 2; K <= 12; ++K) {
        const double cur = truncation_error(r, 1.0, K);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
      }
    }
  }
}

TEST_CASE("triangle inequality between the two traces") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MrfModel r = random_model(4, seed, 0.8);
    for (int K : {0, 1, 3, 7}) {
      const double lhs =
          std::abs(exact_sk_trace(r, 1.0, K) - exact_partition(r, 1.0));
      CHECK(lhs <= truncation_error(r, 1.0, K) + 1e-12);
    }
  }
}

TEST_CASE("ceil-mode truncation order meets the eps/2 guarantee") {
  // 50 random models, n in 1..6, beta_eff <= 1.
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 50; ++seed) {
    for (int n = 1; n <= 6 && checked < 50; ++n, ++checked) {
      const MrfModel r = random_model(n, seed + 100, 0.9);
      for (double eps : {0.1, 0.01}) {
        const int K = truncation_order(n, eps, KMode::kCeil);
        CHECK(truncation_error(r, 1.0, K) <= eps / 2.0);
      }
    }
  }
}
