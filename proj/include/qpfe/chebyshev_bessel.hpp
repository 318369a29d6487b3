#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>

namespace qpfe {

/// Modified Bessel function of the first kind I_k(beta), beta >= 0.
///
/// Direct power series sum_j (beta/2)^(2j+k) / (j! (j+k)!), terminated when a
/// term drops below 1e-17 of the running partial sum. Intended for the small
/// arguments used here (beta <= ~4); no asymptotic branch.
double bessel_i(int k, double beta);

/// Chebyshev polynomial of the first kind T_k(x) by the three-term
/// recurrence. x is clamped to [-1, 1]; values beyond 1e-12 outside that
/// interval are rejected.
double chebyshev_T(int k, double x);

enum class KMode { kCeil, kTable };
enum class LogMode { kNatural, kBase10 };

/// Series truncation order K = ceil(m + e + log2(1/eps_abs) + 2).
/// KMode::kCeil applies the literal ceiling; KMode::kTable rounds to nearest,
/// which is the variant that reproduces the published K_th column.
int truncation_order(int m, double eps_abs, KMode mode = KMode::kCeil);

/// Shot budget with overflow handling: q saturates at 2^63 - 1 with the flag
/// set; log2_q stays meaningful either way.
struct SampleBudget {
  std::uint64_t q = 0;
  bool saturated = false;
  double log2_q = 0.0;
};

/// Q = ceil(2^(2(n+m')+1) * log(2K/delta) / (eps_abs/2e)^2).
/// LogMode selects the logarithm base; base 10 reproduces the published Q_th
/// column, natural log is the literal reading.
SampleBudget sample_budget(int n, int m_prime, int K, double delta,
                           double eps_abs, LogMode mode = LogMode::kNatural);

/// Everything the series assembly needs: truncation order, shot budget,
/// effective inverse temperature and the Bessel coefficients I_0..I_K.
struct ChebyshevBudget {
  int K = 0;
  SampleBudget Q;
  double beta_eff = 0.0;
  Eigen::VectorXd bessel;  // K + 1 entries, bessel[k] = I_k(beta_eff)
  double eps_abs = 0.1;
  double delta = 0.1;
  KMode k_mode = KMode::kCeil;
  LogMode log_mode = LogMode::kNatural;
};

ChebyshevBudget make_budget(int K, std::uint64_t Q, double beta_eff,
                            double eps_abs = 0.1, double delta = 0.1);

/// Tr(S_K) = I_0(beta_eff) 2^n + 2 sum_{k=1}^K (-1)^k I_k(beta_eff) chi_k.
/// chi holds the k = 1..K traces; chi.size() must equal budget.K.
double assemble_trace(int n, const ChebyshevBudget& budget,
                      std::span<const double> chi);

}  // namespace qpfe
