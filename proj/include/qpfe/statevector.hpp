#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <string>

namespace qpfe {

inline constexpr int kDefaultQubitCapacity = 26;  // 1 GiB of amplitudes

using Complex = std::complex<double>;

/// Which registers a state vector carries.
///
/// Basis ordering (fixed; every golden trace depends on it): registers are
/// laid out most- to least-significant as
///
///   clean | n | m' | second m'
///
/// and little-endian within each register, so for a full layout
///
///   index = clean * 2^(n+2m') + x * 2^(2m') + l1 * 2^(m') + l2 .
///
/// Within an m' register the low m bits are the LCU index l and the top bit
/// is the extra ancilla a, i.e. l' = l + 2^m * a.
struct RegisterLayout {
  int n = 0;
  int m = 0;
  bool clean = false;
  bool paired = false;  // second m' register present (purified pairing)

  int m_prime() const { return m + 1; }
  int mp2_shift() const { return 0; }  // second m' occupies the low bits
  int mp1_shift() const { return paired ? m_prime() : 0; }
  int n_shift() const { return mp1_shift() + m_prime(); }
  int clean_shift() const { return n_shift() + n; }
  int total_qubits() const { return clean_shift() + (clean ? 1 : 0); }

  std::uint64_t compose(std::uint64_t clean_bit, std::uint64_t x,
                        std::uint64_t l1, std::uint64_t l2 = 0) const {
    return (clean_bit << clean_shift()) | (x << n_shift()) |
           (l1 << mp1_shift()) | l2;
  }
};

/// Dense complex amplitude vector over a RegisterLayout.
struct StateVector {
  RegisterLayout layout;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
};

/// |basis> on the given layout; throws CapacityError beyond the qubit cap.
StateVector make_basis_state(const RegisterLayout& layout, std::uint64_t basis,
                             int cap = kDefaultQubitCapacity);

/// Nonzero amplitudes as "index amplitude" lines, for fixture capture.
std::string dump_nonzero(const StateVector& state, double tol = 1e-14);

}  // namespace qpfe
