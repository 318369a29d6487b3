#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "qpfe/chebyshev_bessel.hpp"
#include "qpfe/errors.hpp"
#include "qpfe/spectral_oracle.hpp"
#include "qpfe/walk.hpp"
#include "test_helpers.hpp"

using namespace qpfe;
using qpfe::test::markov5;
using qpfe::test::single_node;

namespace {

WalkContext ctx_for(const MrfModel& model) {
  return make_walk_context(decompose(normalize(model)));
}

// Dense matrix of a block operation, column by column.
Eigen::MatrixXcd dense_of(const RegisterLayout& layout, const WalkContext& ctx,
                          int k) {
  const std::int64_t dim = std::int64_t{1} << layout.total_qubits();
  Eigen::MatrixXcd mat(dim, dim);
  for (std::int64_t col = 0; col < dim; ++col) {
    StateVector s = make_basis_state(layout, static_cast<std::uint64_t>(col));
    apply_walk(s, ctx, k);
    mat.col(col) = s.amps;
  }
  return mat;
}

}  // namespace

TEST_CASE("register layout bit assignment") {
  RegisterLayout g;
  g.n = 2;
  g.m = 3;
  g.clean = true;
  g.paired = true;
  CHECK(g.m_prime() == 4);
  CHECK(g.total_qubits() == 1 + 2 + 4 + 4);
  CHECK(g.compose(1, 0, 0, 0) == (std::uint64_t{1} << 10));
  CHECK(g.compose(0, 3, 0, 0) == (std::uint64_t{3} << 8));
  CHECK(g.compose(0, 0, 5, 0) == (std::uint64_t{5} << 4));
  CHECK(g.compose(0, 0, 0, 9) == 9);
}

TEST_CASE("prepare_pprime injects the oracle amplitudes") {
  const WalkContext ctx = ctx_for(single_node());
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  StateVector s = make_basis_state(g, g.compose(0, 1, 0));
  prepare_pprime(s, ctx);
  CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // m' register state (1/2, 1/2, 1/2, 1/2) on the x = 1 slice
  for (std::uint64_t l = 0; l < 4; ++l) {
    CHECK(s.amps[static_cast<std::int64_t>(g.compose(0, 1, l))].real() ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(s.amps[static_cast<std::int64_t>(g.compose(0, 0, l))]) ==
          0.0);
  }
}

TEST_CASE("prepare_pprime rejects an occupied m' register") {
  const WalkContext ctx = ctx_for(single_node());
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  StateVector s = make_basis_state(g, g.compose(0, 0, 2));
  CHECK_THROWS(prepare_pprime(s, ctx));
}

TEST_CASE("padded branches keep zero amplitude") {
  // 3 raw terms padded to 4: one node plus one edge on n = 2 needs 6 -> use
  // a 3-entry model instead: 1 node (2 terms) padded from raw 2 to 2 is not
  // padded, so take 2 nodes + 1 edge = 8 terms (no padding) vs 2 nodes = 4.
  MrfModel m;
  m.n = 3;
  m.theta = {{0, 0, 0.4}, {1, 1, 0.3}, {2, 2, 0.3}};
  const Lcu lcu = decompose(m);
  CHECK(lcu.raw_term_count() == 6);
  CHECK(lcu.terms.size() == 8);
  const WalkContext ctx = make_walk_context(lcu);
  RegisterLayout g;
  g.n = 3;
  g.m = lcu.m;
  StateVector s = make_basis_state(g, g.compose(0, 5, 0));
  prepare_pprime(s, ctx);
  apply_walk(s, ctx, 3);
  for (std::uint64_t l = 6; l < 8; ++l) {  // padded l, both a branches
    CHECK(std::abs(s.amps[static_cast<std::int64_t>(g.compose(0, 5, l))]) <
          1e-14);
    CHECK(std::abs(s.amps[static_cast<std::int64_t>(
              g.compose(0, 5, l | 8))]) < 1e-14);
  }
}

TEST_CASE("apply_select multiplies by term eigenvalues") {
  const WalkContext ctx = ctx_for(single_node());
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  // basis |x=1, l=1, a=0>: term (+1, {0}) at x = 1 has eigenvalue -1
  StateVector s = make_basis_state(g, g.compose(0, 1, 1));
  apply_select(s, ctx);
  CHECK(s.amps[static_cast<std::int64_t>(g.compose(0, 1, 1))].real() ==
        doctest::Approx(-1.0));
  // identity-only LCU leaves any state unchanged
  Lcu idlcu;
  idlcu.n = 1;
  idlcu.terms = {{+1, 0, 0.5, false}, {+1, 0, 0.5, false}};
  idlcu.m = 1;
  const WalkContext idctx = make_walk_context(idlcu);
  StateVector t = make_basis_state(g, g.compose(0, 1, 0));
  prepare_pprime(t, idctx);
  const Eigen::VectorXcd before = t.amps;
  apply_select(t, idctx);
  CHECK((t.amps - before).norm() == doctest::Approx(0.0));
}

TEST_CASE("apply_select twice is the identity") {
  const WalkContext ctx = ctx_for(markov5());
  RegisterLayout g;
  g.n = 5;
  g.m = ctx.m();
  StateVector s = make_basis_state(g, g.compose(0, 19, 0));
  prepare_pprime(s, ctx);
  apply_walk(s, ctx, 1);  // spread some amplitude around first
  const Eigen::VectorXcd before = s.amps;
  apply_select(s, ctx);
  apply_select(s, ctx);
  CHECK((s.amps - before).norm() < 1e-12);
}

TEST_CASE("walk preserves the norm") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const MrfModel m = random_model(2 + static_cast<int>(seed % 2), seed, 0.8);
    const WalkContext ctx = ctx_for(m);
    RegisterLayout g;
    g.n = m.n;
    g.m = ctx.m();
    StateVector s = make_basis_state(g, 0);
    prepare_pprime(s, ctx);
    apply_walk(s, ctx, 5);
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("dense walk matrix is unitary for the single-node model") {
  const WalkContext ctx = ctx_for(single_node());
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  const Eigen::MatrixXcd W = dense_of(g, ctx, 1);
  REQUIRE(W.rows() == 8);
  const Eigen::MatrixXcd should_be_id = W * W.adjoint();
  CHECK((should_be_id - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("projected_chi equals the spectral oracle") {
  SUBCASE("k = 0 counts the configurations") {
    CHECK(projected_chi(ctx_for(single_node()), 0) == doctest::Approx(2.0));
  }
  SUBCASE("single node, k = 1") {
    CHECK(projected_chi(ctx_for(single_node()), 1) ==
          doctest::Approx(-1.0).epsilon(1e-12));
  }
  SUBCASE("random models up to n = 3, k <= 5") {
    for (std::uint64_t seed = 0; seed < 7; ++seed) {
      const int n = 1 + static_cast<int>(seed % 3);
      const MrfModel m = random_model(n, 40 + seed, 0.8);
      const WalkContext ctx = ctx_for(m);
      for (int k = 0; k <= 5; ++k) {
        CHECK(projected_chi(ctx, k) ==
              doctest::Approx(exact_chi(m, k)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("hadamard_test_p0") {
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  g.clean = true;
  SUBCASE("controlled identity gives p0 = 1") {
    const double p0 =
        hadamard_test_p0(g, [](Eigen::Ref<Eigen::VectorXcd>) {}, 5);
    CHECK(p0 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("controlled Z averaged over both basis states gives 1/2") {
    RegisterLayout zg;
    zg.n = 1;
    zg.m = 0;  // 1 + 1 + 1 qubits; apply Z on the n-register qubit
    zg.clean = true;
    auto cz = [&](Eigen::Ref<Eigen::VectorXcd> block) {
      for (std::int64_t i = 0; i < block.size(); ++i)
        if ((static_cast<std::uint64_t>(i) >> zg.n_shift()) & 1ULL)
          block[i] = -block[i];
    };
    const double p0a = hadamard_test_p0(zg, cz, zg.compose(0, 0, 0));
    const double p0b = hadamard_test_p0(zg, cz, zg.compose(0, 1, 0));
    CHECK(p0a == doctest::Approx(1.0));
    CHECK(p0b == doctest::Approx(0.0));
    CHECK(0.5 * (p0a + p0b) == doctest::Approx(0.5));
  }
}

TEST_CASE("apply_Uk") {
  const WalkContext ctx = ctx_for(single_node());
  RegisterLayout g;
  g.n = 1;
  g.m = 1;
  g.paired = true;
  SUBCASE("k = 0 from the all-zero state is the identity on it") {
    StateVector s = make_basis_state(g, 0);
    apply_Uk(s, ctx, 0);
    CHECK(s.amps[0].real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("norm preserved from arbitrary basis states") {
    for (std::uint64_t b : {1ULL, 7ULL, 21ULL, 30ULL}) {
      StateVector s = make_basis_state(g, b);
      apply_Uk(s, ctx, 3);
      CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("layout without pairing is rejected") {
    RegisterLayout bad;
    bad.n = 1;
    bad.m = 1;
    StateVector s = make_basis_state(bad, 0);
    CHECK_THROWS(apply_Uk(s, ctx, 1));
  }
}

TEST_CASE("trace of U_k equals 2^m' chi_k") {
  // dense enumeration over all basis states of (n, m', m')
  for (std::uint64_t seed : {3ULL, 11ULL}) {
    MrfModel m;
    if (seed == 3) {
      m.n = 2;
      m.theta = {{0, 1, 1.0}};  // L = 4, m = 2, m' = 3 -> 8 qubits total
    } else {
      m = random_model(2, seed, 1.0);  // complete: m = 3, m' = 4 -> 10 qubits
    }
    const MrfModel norm = normalize(m);
    const WalkContext ctx = make_walk_context(decompose(norm));
    RegisterLayout g;
    g.n = norm.n;
    g.m = ctx.m();
    g.paired = true;
    const std::int64_t dim = std::int64_t{1} << g.total_qubits();
    for (int k = 0; k <= 3; ++k) {
      Complex trace{0.0, 0.0};
      for (std::int64_t b = 0; b < dim; ++b) {
        StateVector s = make_basis_state(g, static_cast<std::uint64_t>(b));
        apply_Uk(s, ctx, k);
        trace += s.amps[b];
      }
      const double expected =
          std::ldexp(1.0, ctx.m_prime()) * exact_chi(norm, k);
      CHECK(trace.real() == doctest::Approx(expected).epsilon(1e-9));
      CHECK(std::abs(trace.imag()) < 1e-9);
    }
  }
}

TEST_CASE("shot probabilities") {
  const MrfModel m = normalize(single_node());
  const WalkContext ctx = ctx_for(m);
  SUBCASE("reduced shot p0 is 1/2 + T_k(lambda_x)/2") {
    const SpectrumView v = spectrum(m);
    for (int k = 0; k <= 3; ++k) {
      for (std::uint64_t x = 0; x < 2; ++x) {
        const double expected =
            0.5 + 0.5 * chebyshev_T(k, v.eigenvalues[static_cast<int>(x)]);
        CHECK(reduced_shot_p0(ctx, k, x) ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
  SUBCASE("basis-sampled shots with l1 != 0 are even coins") {
    CHECK(basis_sampled_shot_p0(ctx, 2, 1, 1, 0) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(basis_sampled_shot_p0(ctx, 2, 1, 3, 2) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("basis-sampled average reproduces the trace formula") {
    for (int k = 1; k <= 3; ++k) {
      double mean = 0.0;
      const int q = ctx.n() + 2 * ctx.m_prime();
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << q); ++b) {
        const std::uint64_t mp_mask = (1ULL << ctx.m_prime()) - 1;
        const std::uint64_t l2 = b & mp_mask;
        const std::uint64_t l1 = (b >> ctx.m_prime()) & mp_mask;
        const std::uint64_t x = b >> (2 * ctx.m_prime());
        mean += basis_sampled_shot_p0(ctx, k, x, l1, l2);
      }
      mean /= std::ldexp(1.0, q);
      const double expected =
          0.5 + std::ldexp(1.0, ctx.m_prime()) * exact_chi(m, k) /
                    std::ldexp(1.0, q + 1);
      CHECK(mean == doctest::Approx(expected).epsilon(1e-11));
    }
  }
}

TEST_CASE("purified p0 equals the reduced-mode analytic mean") {
  // n + 2m' <= 10 instances
  std::vector<MrfModel> models;
  models.push_back(normalize(single_node()));  // n=1, m'=2 -> 5
  MrfModel edge;
  edge.n = 2;
  edge.theta = {{0, 1, 1.0}};
  models.push_back(normalize(edge));           // n=2, m'=3 -> 8
  models.push_back(random_model(2, 5, 1.0));   // n=2, m'=4 -> 10
  for (const auto& m : models) {
    const WalkContext ctx = make_walk_context(decompose(m));
    for (int k = 1; k <= 3; ++k) {
      const double pure = purified_p0(ctx, k);
      const double expected =
          0.5 + exact_chi(m, k) / std::ldexp(1.0, m.n + ctx.m_prime() + 1);
      CHECK(pure == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("capacity limits are enforced") {
  const WalkContext ctx = ctx_for(markov5());
  CHECK_THROWS_AS(projected_chi(ctx, 1, 5), CapacityError);
  CHECK_THROWS_AS(purified_p0(ctx, 1, 10), CapacityError);
}
