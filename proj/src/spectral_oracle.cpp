#include "qpfe/spectral_oracle.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "qpfe/chebyshev_bessel.hpp"
#include "qpfe/errors.hpp"

namespace qpfe {

namespace {

void require_normalized(const MrfModel& model) {
  if (!model.is_normalized())
    throw std::invalid_argument("spectral oracle: model must be normalized");
}

void require_within_cap(int n, int cap) {
  if (n > cap)
    throw CapacityError("spectral oracle: n exceeds enumeration cap " +
                        std::to_string(cap));
}

// Pairwise reduction over [lo, hi). Fixed split points make the result
// independent of any outer partitioning of the range.
double pairwise_sum(std::uint64_t lo, std::uint64_t hi,
                    const std::function<double(std::uint64_t)>& f) {
  const std::uint64_t len = hi - lo;
  if (len <= 64) {
    double s = 0.0;
    for (std::uint64_t x = lo; x < hi; ++x) s += f(x);
    return s;
  }
  const std::uint64_t mid = lo + len / 2;
  return pairwise_sum(lo, mid, f) + pairwise_sum(mid, hi, f);
}

}  // namespace

SpectrumView spectrum(const MrfModel& model, int cap) {
  require_normalized(model);
  require_within_cap(model.n, cap);
  SpectrumView view;
  view.n = model.n;
  view.eigenvalues.resize(std::int64_t{1} << model.n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << model.n); ++x)
    view.eigenvalues[static_cast<std::int64_t>(x)] = -energy(model, x);
  return view;
}

double exact_partition(const MrfModel& model, double beta, int cap) {
  require_normalized(model);
  require_within_cap(model.n, cap);
  if (beta < 0.0) throw std::invalid_argument("exact_partition: beta < 0");
  const double beta_eff = beta * model.scale;
  return pairwise_sum(0, std::uint64_t{1} << model.n, [&](std::uint64_t x) {
    return std::exp(beta_eff * energy(model, x));
  });
}

double exact_chi(const MrfModel& model, int k, int cap) {
  require_normalized(model);
  require_within_cap(model.n, cap);
  if (k < 0) throw std::invalid_argument("exact_chi: k < 0");
  return pairwise_sum(0, std::uint64_t{1} << model.n, [&](std::uint64_t x) {
    return chebyshev_T(k, -energy(model, x));
  });
}

namespace {

// S_K eigenvalue at lambda, with the Chebyshev recurrence inlined so one
// pass covers all orders.
double sk_eigenvalue(double lambda, const ChebyshevBudget& budget) {
  double acc = budget.bessel[0];
  double prev = 1.0, cur = lambda, sign = -1.0;
  for (int k = 1; k <= budget.K; ++k) {
    acc += 2.0 * sign * budget.bessel[k] * cur;
    const double next = 2.0 * lambda * cur - prev;
    prev = cur;
    cur = next;
    sign = -sign;
  }
  return acc;
}

}  // namespace

double exact_sk_trace(const MrfModel& model, double beta, int K, int cap) {
  require_normalized(model);
  require_within_cap(model.n, cap);
  if (K < 0) throw std::invalid_argument("exact_sk_trace: K < 0");
  const ChebyshevBudget budget = make_budget(K, 0, beta * model.scale);
  return pairwise_sum(0, std::uint64_t{1} << model.n, [&](std::uint64_t x) {
    return sk_eigenvalue(-energy(model, x), budget);
  });
}

double truncation_error(const MrfModel& model, double beta, int K, int cap) {
  require_normalized(model);
  require_within_cap(model.n, cap);
  if (K < 0) throw std::invalid_argument("truncation_error: K < 0");
  const double beta_eff = beta * model.scale;
  const ChebyshevBudget budget = make_budget(K, 0, beta_eff);
  return pairwise_sum(0, std::uint64_t{1} << model.n, [&](std::uint64_t x) {
    const double lambda = -energy(model, x);
    return std::abs(sk_eigenvalue(lambda, budget) -
                    std::exp(-beta_eff * lambda));
  });
}

}  // namespace qpfe
