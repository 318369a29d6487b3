#include "qpfe/walk.hpp"

#include <cmath>
#include <stdexcept>

#include "qpfe/errors.hpp"

namespace qpfe {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Block kernels. A block is any amplitude range whose low bits follow the
// geometry's (m', n) fields; bits above n (a clean qubit, purification
// ancillas) are spectators and pass through untouched.

std::uint64_t mp_mask(const RegisterLayout& g) {
  return (std::uint64_t{1} << g.m_prime()) - 1;
}

void kernel_select(Eigen::Ref<Eigen::VectorXcd> block,
                   const RegisterLayout& g, const WalkContext& ctx) {
  const std::uint64_t lmask = (std::uint64_t{1} << g.m) - 1;
  const std::uint64_t nmask = (std::uint64_t{1} << g.n) - 1;
  const int mp1 = g.mp1_shift();
  const int ns = g.n_shift();
  for (std::int64_t idx = 0; idx < block.size(); ++idx) {
    const std::uint64_t u = static_cast<std::uint64_t>(idx);
    const std::uint64_t lp = (u >> mp1) & mp_mask(g);
    const std::uint64_t l = lp & lmask;
    const std::uint64_t x = (u >> ns) & nmask;
    const int parity =
        static_cast<int>(__builtin_popcountll(x & ctx.masks[l])) & 1;
    const Complex ev{static_cast<double>(parity ? -ctx.signs[l] : ctx.signs[l]),
                     0.0};
    // a = 0 takes the S branch, a = 1 the S^dag branch; Z strings are
    // Hermitian so the branches coincide, but the routing stays explicit.
    block[idx] *= (lp >> g.m) ? std::conj(ev) : ev;
  }
}

void kernel_xa(Eigen::Ref<Eigen::VectorXcd> block, const RegisterLayout& g) {
  const std::uint64_t bit = std::uint64_t{1} << (g.mp1_shift() + g.m);
  for (std::int64_t idx = 0; idx < block.size(); ++idx) {
    const std::uint64_t u = static_cast<std::uint64_t>(idx);
    if (u & bit) continue;
    std::swap(block[idx], block[static_cast<std::int64_t>(u | bit)]);
  }
}

// Iterates the m'-register slices of a block: slice s has its elements at
// base(s) + l' * 2^mp1_shift for l' in [0, 2^m').
template <typename F>
void for_each_mp_slice(std::int64_t block_size, const RegisterLayout& g,
                       F&& f) {
  const int mp = g.m_prime();
  const std::uint64_t stride = std::uint64_t{1} << g.mp1_shift();
  const std::uint64_t low = stride - 1;
  const std::int64_t slices = block_size >> mp;
  for (std::int64_t s = 0; s < slices; ++s) {
    const std::uint64_t u = static_cast<std::uint64_t>(s);
    const std::uint64_t base = ((u & ~low) << mp) | (u & low);
    f(base, stride);
  }
}

// 2|P'><P'| - I on each m' slice.
void kernel_reflect(Eigen::Ref<Eigen::VectorXcd> block,
                    const RegisterLayout& g, const Eigen::VectorXd& prep) {
  const std::int64_t dim = prep.size();
  for_each_mp_slice(block.size(), g, [&](std::uint64_t base,
                                         std::uint64_t stride) {
    Complex c{0.0, 0.0};
    for (std::int64_t l = 0; l < dim; ++l)
      c += prep[l] * block[static_cast<std::int64_t>(base + l * stride)];
    c *= 2.0;
    for (std::int64_t l = 0; l < dim; ++l) {
      auto& a = block[static_cast<std::int64_t>(base + l * stride)];
      a = c * prep[l] - a;
    }
  });
}

// The Householder reflection through |P'> - |0>: a self-inverse unitary
// completion of the prepare oracle, exchanging |0> and |P'>.
void kernel_householder_pprime(Eigen::Ref<Eigen::VectorXcd> block,
                               const RegisterLayout& g,
                               const Eigen::VectorXd& prep) {
  const std::int64_t dim = prep.size();
  const double w2 = 2.0 - 2.0 * prep[0];  // ||prep - e0||^2
  for_each_mp_slice(block.size(), g, [&](std::uint64_t base,
                                         std::uint64_t stride) {
    Complex c{0.0, 0.0};
    for (std::int64_t l = 0; l < dim; ++l)
      c += prep[l] * block[static_cast<std::int64_t>(base + l * stride)];
    c -= block[static_cast<std::int64_t>(base)];
    c *= 2.0 / w2;
    for (std::int64_t l = 0; l < dim; ++l)
      block[static_cast<std::int64_t>(base + l * stride)] -= c * prep[l];
    block[static_cast<std::int64_t>(base)] += c;
  });
}

void kernel_walk(Eigen::Ref<Eigen::VectorXcd> block, const RegisterLayout& g,
                 const WalkContext& ctx, int k) {
  for (int i = 0; i < k; ++i) {
    kernel_select(block, g, ctx);
    kernel_xa(block, g);
    kernel_reflect(block, g, ctx.prep_amps);
  }
}

// CNOTs from each bit of the first m' register onto the matching bit of the
// second: l2 -> l2 xor l1, an in-place involution.
void kernel_cnot_pairing(Eigen::Ref<Eigen::VectorXcd> block,
                         const RegisterLayout& g) {
  const int mp1 = g.mp1_shift();
  for (std::int64_t idx = 0; idx < block.size(); ++idx) {
    const std::uint64_t u = static_cast<std::uint64_t>(idx);
    const std::uint64_t l1 = (u >> mp1) & mp_mask(g);
    const std::uint64_t partner = u ^ l1;  // second register at the low bits
    if (partner > u) std::swap(block[idx], block[static_cast<std::int64_t>(partner)]);
  }
}

void kernel_uk(Eigen::Ref<Eigen::VectorXcd> block, const RegisterLayout& g,
               const WalkContext& ctx, int k) {
  kernel_cnot_pairing(block, g);
  kernel_householder_pprime(block, g, ctx.prep_amps);  // P'
  kernel_walk(block, g, ctx, k);
  kernel_householder_pprime(block, g, ctx.prep_amps);  // P'^dag
}

// Elementary gates for the purification construction.
void h_gate(Eigen::VectorXcd& vec, int bit) {
  const std::uint64_t b = std::uint64_t{1} << bit;
  for (std::int64_t idx = 0; idx < vec.size(); ++idx) {
    const std::uint64_t u = static_cast<std::uint64_t>(idx);
    if (u & b) continue;
    const Complex lo = vec[idx];
    const Complex hi = vec[static_cast<std::int64_t>(u | b)];
    vec[idx] = (lo + hi) * kInvSqrt2;
    vec[static_cast<std::int64_t>(u | b)] = (lo - hi) * kInvSqrt2;
  }
}

void cnot_gate(Eigen::VectorXcd& vec, int control, int target) {
  const std::uint64_t cb = std::uint64_t{1} << control;
  const std::uint64_t tb = std::uint64_t{1} << target;
  for (std::int64_t idx = 0; idx < vec.size(); ++idx) {
    const std::uint64_t u = static_cast<std::uint64_t>(idx);
    if ((u & cb) && !(u & tb))
      std::swap(vec[idx], vec[static_cast<std::int64_t>(u | tb)]);
  }
}

void check_compatible(const StateVector& state, const WalkContext& ctx) {
  if (state.layout.n != ctx.n() || state.layout.m != ctx.m())
    throw std::invalid_argument("walk: state layout does not match context");
}

}  // namespace

WalkContext make_walk_context(const Lcu& lcu) {
  WalkContext ctx;
  ctx.lcu = lcu;
  const std::size_t L = lcu.terms.size();
  ctx.masks.resize(L);
  ctx.signs.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    ctx.masks[l] = lcu.terms[l].support_mask;
    ctx.signs[l] = lcu.terms[l].sign;
  }
  const Eigen::VectorXd amp = amplitudes(lcu);
  ctx.prep_amps.resize(2 * amp.size());
  ctx.prep_amps.head(amp.size()) = amp * kInvSqrt2;
  ctx.prep_amps.tail(amp.size()) = amp * kInvSqrt2;
  return ctx;
}

void prepare_pprime(StateVector& state, const WalkContext& ctx) {
  check_compatible(state, ctx);
  const RegisterLayout& g = state.layout;
  const std::int64_t dim = ctx.prep_amps.size();
  for_each_mp_slice(state.amps.size(), g, [&](std::uint64_t base,
                                              std::uint64_t stride) {
    for (std::int64_t l = 1; l < dim; ++l)
      if (std::abs(state.amps[static_cast<std::int64_t>(base + l * stride)]) >
          1e-12)
        throw std::invalid_argument(
            "prepare_pprime: m' register is not in |0...0>");
    const Complex a0 = state.amps[static_cast<std::int64_t>(base)];
    for (std::int64_t l = 0; l < dim; ++l)
      state.amps[static_cast<std::int64_t>(base + l * stride)] =
          a0 * ctx.prep_amps[l];
  });
}

void apply_select(StateVector& state, const WalkContext& ctx) {
  check_compatible(state, ctx);
  kernel_select(state.amps, state.layout, ctx);
}

void apply_walk(StateVector& state, const WalkContext& ctx, int k) {
  check_compatible(state, ctx);
  if (k < 0) throw std::invalid_argument("apply_walk: k < 0");
  kernel_walk(state.amps, state.layout, ctx, k);
}

void apply_Uk(StateVector& state, const WalkContext& ctx, int k) {
  check_compatible(state, ctx);
  if (!state.layout.paired)
    throw std::invalid_argument("apply_Uk: layout has no second m' register");
  if (k < 0) throw std::invalid_argument("apply_Uk: k < 0");
  kernel_uk(state.amps, state.layout, ctx, k);
}

double projected_chi(const WalkContext& ctx, int k, int cap) {
  if (k < 0) throw std::invalid_argument("projected_chi: k < 0");
  RegisterLayout g;
  g.n = ctx.n();
  g.m = ctx.m();
  if (g.total_qubits() > cap)
    throw CapacityError("projected_chi: state exceeds qubit capacity");
  const std::int64_t size = std::int64_t{1} << g.total_qubits();
  const std::int64_t dim = ctx.prep_amps.size();
  Eigen::VectorXcd amps(size);
  double chi = 0.0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << g.n); ++x) {
    amps.setZero();
    for (std::int64_t l = 0; l < dim; ++l)
      amps[static_cast<std::int64_t>(g.compose(0, x, l))] = ctx.prep_amps[l];
    kernel_walk(amps, g, ctx, k);
    Complex overlap{0.0, 0.0};
    for (std::int64_t l = 0; l < dim; ++l)
      overlap += ctx.prep_amps[l] *
                 amps[static_cast<std::int64_t>(g.compose(0, x, l))];
    chi += overlap.real();
  }
  return chi;
}

double hadamard_test_p0(const RegisterLayout& layout, const BlockOp& op,
                        std::uint64_t initial_basis, int cap) {
  if (!layout.clean)
    throw std::invalid_argument("hadamard_test_p0: layout has no clean qubit");
  if (layout.total_qubits() > cap)
    throw CapacityError("hadamard_test_p0: state exceeds qubit capacity");
  const std::int64_t half = std::int64_t{1} << (layout.total_qubits() - 1);
  if (initial_basis >= static_cast<std::uint64_t>(half))
    throw std::invalid_argument("hadamard_test_p0: initial basis out of range");

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2 * half);
  // H on the clean qubit from |0>|initial>.
  amps[static_cast<std::int64_t>(initial_basis)] = kInvSqrt2;
  amps[half + static_cast<std::int64_t>(initial_basis)] = kInvSqrt2;
  op(amps.segment(half, half));
  // Final H on the clean qubit; |0> outcomes live in the lower half.
  Eigen::VectorXcd lo = amps.head(half);
  amps.head(half) = (lo + amps.tail(half)) * kInvSqrt2;
  amps.tail(half) = (lo - amps.tail(half)) * kInvSqrt2;
  return amps.head(half).squaredNorm();
}

BlockOp controlled_walk_sandwich(const WalkContext& ctx, int k) {
  RegisterLayout g;
  g.n = ctx.n();
  g.m = ctx.m();
  return [&ctx, g, k](Eigen::Ref<Eigen::VectorXcd> block) {
    kernel_householder_pprime(block, g, ctx.prep_amps);
    kernel_walk(block, g, ctx, k);
    kernel_householder_pprime(block, g, ctx.prep_amps);
  };
}

BlockOp controlled_uk(const WalkContext& ctx, int k) {
  RegisterLayout g;
  g.n = ctx.n();
  g.m = ctx.m();
  g.paired = true;
  return [&ctx, g, k](Eigen::Ref<Eigen::VectorXcd> block) {
    kernel_uk(block, g, ctx, k);
  };
}

double reduced_shot_p0(const WalkContext& ctx, int k, std::uint64_t x,
                       int cap) {
  RegisterLayout layout;
  layout.n = ctx.n();
  layout.m = ctx.m();
  layout.clean = true;
  return hadamard_test_p0(layout, controlled_walk_sandwich(ctx, k),
                          layout.compose(0, x, 0), cap);
}

double basis_sampled_shot_p0(const WalkContext& ctx, int k, std::uint64_t x,
                             std::uint64_t l1, std::uint64_t l2, int cap) {
  RegisterLayout layout;
  layout.n = ctx.n();
  layout.m = ctx.m();
  layout.clean = true;
  layout.paired = true;
  return hadamard_test_p0(layout, controlled_uk(ctx, k),
                          layout.compose(0, x, l1, l2), cap);
}

double purified_p0(const WalkContext& ctx, int k, int cap) {
  const int q = ctx.n() + 2 * ctx.m_prime();
  const int total = 2 * q + 1;
  if (total > cap)
    throw CapacityError("purified_p0: " + std::to_string(total) +
                        " qubits exceed capacity " + std::to_string(cap));
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(std::int64_t{1} << total);
  amps[0] = Complex{1.0, 0.0};
  // Hadamard + CNOT onto a private ancilla turns each main-register qubit
  // into one half of a Bell pair: tracing the ancillas leaves I/2^q.
  for (int i = 0; i < q; ++i) {
    h_gate(amps, i);
    cnot_gate(amps, i, q + i);
  }
  h_gate(amps, 2 * q);
  RegisterLayout g;
  g.n = ctx.n();
  g.m = ctx.m();
  g.paired = true;
  const std::int64_t half = std::int64_t{1} << (2 * q);
  kernel_uk(amps.segment(half, half), g, ctx, k);
  h_gate(amps, 2 * q);
  return amps.head(half).squaredNorm();
}

}  // namespace qpfe
