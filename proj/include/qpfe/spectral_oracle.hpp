#pragma once

#include <Eigen/Core>

#include "qpfe/mrf_model.hpp"

namespace qpfe {

/// Dense eigenvalue table of the block-encoded Hamiltonian H = -H_theta:
/// eigenvalues[x] = -energy(model, x). All entries lie in [-1, 1] for a
/// normalized model.
struct SpectrumView {
  int n = 0;
  Eigen::VectorXd eigenvalues;
};

/// Enumerates all 2^n eigenvalues. Requires a normalized model; refuses
/// n beyond the cap.
SpectrumView spectrum(const MrfModel& model, int cap = kDefaultEnumerationCap);

/// Z = sum_x exp(beta_eff * energy(model, x)) with beta_eff = beta * scale,
/// i.e. the partition function of the original (un-normalized) model.
/// Pairwise summation keeps the result reproducible to 1e-12 regardless of
/// how the enumeration is partitioned.
double exact_partition(const MrfModel& model, double beta,
                       int cap = kDefaultEnumerationCap);

/// chi_k = sum_x T_k(eigenvalue_x).
double exact_chi(const MrfModel& model, int k,
                 int cap = kDefaultEnumerationCap);

/// Tr(S_K) evaluated eigenvalue-wise: sum_x S_K(lambda_x) where
/// S_K(lambda) = I_0(beta_eff) + 2 sum_{k=1}^K (-1)^k I_k(beta_eff) T_k(lambda).
/// This is the x-major route; assemble_trace() is the k-major route, and the
/// two agree to 1e-12.
double exact_sk_trace(const MrfModel& model, double beta, int K,
                      int cap = kDefaultEnumerationCap);

/// Trace-norm truncation error sum_x |S_K(lambda_x) - e^(-beta_eff lambda_x)|;
/// both operators are diagonal in the same basis so the 1-norm is exact.
double truncation_error(const MrfModel& model, double beta, int K,
                        int cap = kDefaultEnumerationCap);

}  // namespace qpfe
