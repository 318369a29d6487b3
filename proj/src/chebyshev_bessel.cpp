#include "qpfe/chebyshev_bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qpfe {

double bessel_i(int k, double beta) {
  if (k < 0) throw std::invalid_argument("bessel_i: k must be >= 0");
  if (beta < 0.0) throw std::invalid_argument("bessel_i: beta must be >= 0");
  if (beta == 0.0) return k == 0 ? 1.0 : 0.0;  // 0^0 = 1

  const double h = beta / 2.0;
  // term_0 = h^k / k!
  double term = 1.0;
  for (int i = 1; i <= k; ++i) term *= h / static_cast<double>(i);
  double sum = term;
  for (int j = 1;; ++j) {
    term *= h * h / (static_cast<double>(j) * static_cast<double>(j + k));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

double chebyshev_T(int k, double x) {
  if (k < 0) throw std::invalid_argument("chebyshev_T: k must be >= 0");
  if (std::abs(x) > 1.0 + 1e-12)
    throw std::invalid_argument("chebyshev_T: |x| > 1");
  x = std::clamp(x, -1.0, 1.0);
  if (k == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int i = 1; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

int truncation_order(int m, double eps_abs, KMode mode) {
  if (!(eps_abs > 0.0 && eps_abs < 1.0))
    throw std::invalid_argument("truncation_order: eps_abs must be in (0,1)");
  const double e = std::exp(1.0);
  const double v =
      static_cast<double>(m) + e + std::log2(1.0 / eps_abs) + 2.0;
  return mode == KMode::kCeil ? static_cast<int>(std::ceil(v))
                              : static_cast<int>(std::llround(v));
}

SampleBudget sample_budget(int n, int m_prime, int K, double delta,
                           double eps_abs, LogMode mode) {
  if (K < 1) throw std::invalid_argument("sample_budget: K must be >= 1");
  if (!(delta > 0.0 && delta < 1.0) || !(eps_abs > 0.0 && eps_abs < 1.0))
    throw std::invalid_argument("sample_budget: delta, eps_abs in (0,1)");

  const double e = std::exp(1.0);
  const double arg = 2.0 * static_cast<double>(K) / delta;
  const double lg = mode == LogMode::kBase10 ? std::log10(arg) : std::log(arg);
  const double denom = (eps_abs / (2.0 * e)) * (eps_abs / (2.0 * e));

  SampleBudget b;
  const double exponent = 2.0 * (n + m_prime) + 1.0;
  b.log2_q = exponent + std::log2(lg) - std::log2(denom);
  if (b.log2_q >= 63.0) {
    b.q = std::numeric_limits<std::uint64_t>::max() >> 1;  // 2^63 - 1
    b.saturated = true;
    return b;
  }
  b.q = static_cast<std::uint64_t>(std::ceil(std::ldexp(lg / denom, 2 * (n + m_prime) + 1)));
  return b;
}

ChebyshevBudget make_budget(int K, std::uint64_t Q, double beta_eff,
                            double eps_abs, double delta) {
  if (K < 0) throw std::invalid_argument("make_budget: K must be >= 0");
  ChebyshevBudget b;
  b.K = K;
  b.Q.q = Q;
  b.Q.log2_q = Q > 0 ? std::log2(static_cast<double>(Q)) : 0.0;
  b.beta_eff = beta_eff;
  b.eps_abs = eps_abs;
  b.delta = delta;
  b.bessel.resize(K + 1);
  for (int k = 0; k <= K; ++k) b.bessel[k] = bessel_i(k, beta_eff);
  return b;
}

double assemble_trace(int n, const ChebyshevBudget& budget,
                      std::span<const double> chi) {
  if (static_cast<int>(chi.size()) != budget.K)
    throw std::invalid_argument("assemble_trace: chi length != K");
  double acc = budget.bessel[0] * std::ldexp(1.0, n);
  double sign = -1.0;
  for (int k = 1; k <= budget.K; ++k) {
    acc += 2.0 * sign * budget.bessel[k] * chi[k - 1];
    sign = -sign;
  }
  return acc;
}

}  // namespace qpfe
