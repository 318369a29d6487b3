#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "qpfe/mrf_model.hpp"

namespace qpfe {

/// A signed Pauli-Z string: sign * Z_{i1} Z_{i2} ... over the support set.
/// Weight is strictly positive except for explicit padding terms.
struct SignedZTerm {
  int sign = +1;                   // +1 or -1
  std::uint64_t support_mask = 0;  // bit i set <=> Z acts on qubit i
  double weight = 0.0;
  bool padding = false;

  std::vector<int> support() const;
};

/// H = -H_theta expanded as sum_l alpha_l H_l with alpha_l > 0 and each H_l a
/// signed Z string. Terms are padded with zero-weight identities to the next
/// power of two; m is the index-register width log2(terms.size()).
struct Lcu {
  int n = 0;
  std::vector<SignedZTerm> terms;
  int m = 0;
  double scale = 1.0;

  int m_prime() const { return m + 1; }
  std::size_t raw_term_count() const;  // terms before padding
  double sum_weights() const;
};

/// Expands theta_ii B_i and theta_ij B_ij with B = (I - Z)/2, globally negated
/// (H = -H_theta). Node terms split in 2, edge terms in 4; nothing is merged,
/// so sum alpha_l = sum|theta| = 1 exactly for a normalized model. Term order
/// is nodes ascending then edges in (i, j) order, each with a fixed sign
/// pattern, so the circuit layout is reproducible.
Lcu decompose(const MrfModel& model);

/// Reconstructs the diagonal of H from the expansion:
/// entry[x] = sum_l sign_l * w_l * (-1)^popcount(x & mask_l).
/// Must match SpectrumView::eigenvalues elementwise.
Eigen::VectorXd diagonal(const Lcu& lcu, int cap = kDefaultEnumerationCap);

/// Prepare-oracle amplitudes sqrt(alpha_l), indexed by l over 2^m entries;
/// unit 2-norm since the weights sum to 1.
Eigen::VectorXd amplitudes(const Lcu& lcu);

/// Eigenvalue (+1 or -1) of the term at computational basis state x.
inline int term_eigenvalue(const SignedZTerm& term, std::uint64_t basis_index) {
  const int parity =
      static_cast<int>(__builtin_popcountll(basis_index & term.support_mask)) & 1;
  return parity ? -term.sign : term.sign;
}

/// Structured-text dump used by the CLI and the golden-file tests.
std::string dump_lcu(const Lcu& lcu);

}  // namespace qpfe
