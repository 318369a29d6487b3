#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "qpfe/pauli_lcu.hpp"
#include "qpfe/statevector.hpp"

namespace qpfe {

/// Precomputed data for the walk operator: the LCU term table and the
/// prepare-oracle amplitude vector |P'> = P|0> tensor H|0> on the m'
/// register, prep[l + 2^m a] = sqrt(alpha_l) / sqrt(2).
struct WalkContext {
  Lcu lcu;
  Eigen::VectorXd prep_amps;          // 2^(m+1) entries, unit 2-norm
  std::vector<std::uint64_t> masks;   // per l, support mask
  std::vector<int> signs;             // per l, +1/-1

  int n() const { return lcu.n; }
  int m() const { return lcu.m; }
  int m_prime() const { return lcu.m + 1; }
};

WalkContext make_walk_context(const Lcu& lcu);

/// Injects |P'> into the m' register. The register must be in |0...0>
/// (all amplitude mass on l' = 0 slices); other registers are untouched.
void prepare_pprime(StateVector& state, const WalkContext& ctx);

/// S' = S (x) |0><0|_a + S^dag (x) |1><1|_a. Z strings are diagonal, so this
/// is a single pass multiplying each amplitude by the eigenvalue of term l at
/// basis state x; the a = 0 and a = 1 branches are routed separately even
/// though they coincide for Hermitian terms.
void apply_select(StateVector& state, const WalkContext& ctx);

/// k applications of W_H = (I_n (x) (2|P'><P'| - I)) X_a S'.
void apply_walk(StateVector& state, const WalkContext& ctx, int k);

/// U_k on a paired layout: CNOT pairing from the first m' register onto the
/// second, then P'^dag (W_H)^k P' on (n, first m'). The prepare oracle and
/// its adjoint are applied as the Householder reflection exchanging |0> and
/// |P'>, a unitary completion of the oracle pair.
void apply_Uk(StateVector& state, const WalkContext& ctx, int k);

/// Re sum_x <x, P'| (W_H)^k |x, P'> = sum_x T_k(lambda_x): the projected
/// Chebyshev block trace, evaluated through the full engine.
double projected_chi(const WalkContext& ctx, int k,
                     int cap = kDefaultQubitCapacity);

/// A unitary applied to the clean = 1 half of a state vector. The block
/// carries the same bit layout as the full state minus the clean qubit.
using BlockOp = std::function<void(Eigen::Ref<Eigen::VectorXcd>)>;

/// H on the clean qubit, the controlled op, H again; returns the exact
/// probability of measuring 0 on the clean qubit. `layout` must have
/// clean = true; `initial_basis` indexes the non-clean registers.
double hadamard_test_p0(const RegisterLayout& layout, const BlockOp& op,
                        std::uint64_t initial_basis,
                        int cap = kDefaultQubitCapacity);

/// Controlled P'^dag W^k P' on an unpaired (n, m') block.
BlockOp controlled_walk_sandwich(const WalkContext& ctx, int k);

/// Controlled U_k on a paired (n, m', m') block.
BlockOp controlled_uk(const WalkContext& ctx, int k);

/// Exact p0 of one reduced-mode shot: Hadamard test of the controlled walk
/// sandwich from |x, 0_m'>, i.e. 1/2 + T_k(lambda_x)/2.
double reduced_shot_p0(const WalkContext& ctx, int k, std::uint64_t x,
                       int cap = kDefaultQubitCapacity);

/// Exact p0 of one basis-sampled shot: Hadamard test of controlled U_k from
/// |x, l1, l2>. Only l1 = 0 contributes; other slices give an even coin.
double basis_sampled_shot_p0(const WalkContext& ctx, int k, std::uint64_t x,
                             std::uint64_t l1, std::uint64_t l2,
                             int cap = kDefaultQubitCapacity);

/// Analytic p0 of the fully purified circuit: every one of the q = n + 2m'
/// mixed qubits is entangled with its own ancilla (Hadamard + CNOT), then the
/// clean qubit Hadamard-tests the controlled U_k on the main register.
/// Simulates 2(n + 2m') + 1 qubits.
double purified_p0(const WalkContext& ctx, int k,
                   int cap = kDefaultQubitCapacity);

}  // namespace qpfe
