#include <doctest.h>

#include <cmath>

#include "qpfe/errors.hpp"
#include "qpfe/mrf_model.hpp"
#include "test_helpers.hpp"

using namespace qpfe;
using qpfe::test::markov5;
using qpfe::test::single_node;

TEST_CASE("parse_model reads the 5-node example") {
  const MrfModel m = markov5();
  CHECK(m.n == 5);
  CHECK(m.theta.size() == 12);
  CHECK(m.scale == 1.0);
  // entries are 0-indexed and sorted by (i, j)
  CHECK(m.theta.front().i == 0);
  CHECK(m.theta.front().j == 0);
  CHECK(m.theta.front().weight == 0.05);
  CHECK(m.sum_abs_theta() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("parse_model single node") {
  const MrfModel m = parse_model(R"({"n": 1, "theta": [[1, 1, 1.0]]})");
  CHECK(m.n == 1);
  CHECK(m.theta.size() == 1);
}

TEST_CASE("parse_model rejections") {
  CHECK_THROWS_AS(parse_model(R"({"n": 3, "theta": [[2, 1, 0.3]]})"),
                  FormatError);  // lower triangle
  CHECK_THROWS_AS(
      parse_model(R"({"n": 2, "theta": [[1, 2, 0.3], [1, 2, 0.1]]})"),
      FormatError);  // duplicate
  CHECK_THROWS_AS(parse_model(R"({"n": 0, "theta": []})"), FormatError);
  CHECK_THROWS_AS(parse_model(R"({"n": 2, "theta": [[1, 3, 0.1]]})"),
                  FormatError);  // out of range
  CHECK_THROWS_AS(parse_model(R"({"n": 2, "theta": [[1, 1, 0.0]]})"),
                  FormatError);  // all-zero after drop
  CHECK_THROWS_AS(parse_model("not json"), FormatError);
}

TEST_CASE("zero-weight entries are dropped on parse") {
  const MrfModel m =
      parse_model(R"({"n": 2, "theta": [[1, 1, 0.5], [1, 2, 0.0]]})");
  CHECK(m.theta.size() == 1);
}

TEST_CASE("energy of the 5-node example") {
  const MrfModel m = markov5();
  CHECK(energy(m, std::uint64_t{0}) == 0.0);
  // nodes 1 and 2 of the figure = bits 0 and 1
  CHECK(energy(m, std::uint64_t{0b00011}) == doctest::Approx(0.10).epsilon(1e-12));
  // all-ones config: the sum of all 12 entries
  CHECK(energy(m, std::uint64_t{0b11111}) == doctest::Approx(0.10).epsilon(1e-12));
  CHECK_THROWS(energy(m, std::uint64_t{1} << 5));
}

TEST_CASE("energy from an explicit bit vector") {
  const MrfModel m = markov5();
  CHECK(energy(m, std::vector<int>{1, 1, 0, 0, 0}) ==
        doctest::Approx(0.10).epsilon(1e-12));
  CHECK_THROWS(energy(m, std::vector<int>{1, 1}));
}

TEST_CASE("normalize") {
  SUBCASE("5-node example is already normalized") {
    const MrfModel m = normalize(markov5());
    CHECK(m.scale == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.theta[0].weight == doctest::Approx(0.05).epsilon(1e-12));
  }
  SUBCASE("single node folds the magnitude into scale") {
    const MrfModel m = normalize(single_node(2.0));
    CHECK(m.theta[0].weight == doctest::Approx(1.0));
    CHECK(m.scale == doctest::Approx(2.0));
  }
  SUBCASE("idempotent on a normalized model") {
    const MrfModel once = normalize(single_node(2.0));
    const MrfModel twice = normalize(once);
    CHECK(twice.scale == doctest::Approx(once.scale).epsilon(1e-12));
  }
  SUBCASE("all-zero theta rejected") {
    MrfModel m;
    m.n = 1;
    CHECK_THROWS(normalize(m));
  }
}

TEST_CASE("normalize preserves energies up to scale") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    MrfModel raw = random_model(4, seed);
    for (auto& e : raw.theta) e.weight *= 3.7;  // de-normalize
    const MrfModel norm = normalize(raw);
    for (std::uint64_t x = 0; x < 16; ++x) {
      CHECK(energy(norm, x) * norm.scale ==
            doctest::Approx(energy(raw, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("normalized energies are bounded by 1") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (int n = 1; n <= 8; ++n) {
      const MrfModel m = random_model(n, seed, 0.8);
      for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x)
        CHECK(std::abs(energy(m, x)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("random_model determinism and shape") {
  const MrfModel a = random_model(3, 7);
  const MrfModel b = random_model(3, 7);
  REQUIRE(a.theta.size() == b.theta.size());
  for (std::size_t i = 0; i < a.theta.size(); ++i) {
    CHECK(a.theta[i].i == b.theta[i].i);
    CHECK(a.theta[i].j == b.theta[i].j);
    CHECK(a.theta[i].weight == b.theta[i].weight);
  }
  CHECK(a.sum_abs_theta() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.scale == 1.0);

  const MrfModel c = random_model(2, 123, 1.0);
  CHECK(c.theta.size() == 3);  // 2 nodes + 1 edge on the complete graph
}

TEST_CASE("serialize round-trips the entry multiset byte-stably") {
  const MrfModel m = markov5();
  const std::string s1 = serialize(m);
  const MrfModel again = parse_model(s1);
  CHECK(serialize(again) == s1);
  REQUIRE(again.theta.size() == m.theta.size());
  for (std::size_t i = 0; i < m.theta.size(); ++i)
    CHECK(again.theta[i].weight == m.theta[i].weight);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MrfModel r = random_model(5, seed, 0.6);
    CHECK(serialize(parse_model(serialize(r))) == serialize(r));
  }
}
