#include "qpfe/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qpfe/errors.hpp"
#include "qpfe/format.hpp"
#include "qpfe/pauli_lcu.hpp"

namespace qpfe {

namespace {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

class StageTimer {
 public:
  explicit StageTimer(std::vector<std::pair<std::string, double>>& sink)
      : sink_(sink) {}
  template <typename F>
  auto run(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(name, t0);
    } else {
      auto r = f();
      record(name, t0);
      return r;
    }
  }

 private:
  void record(const std::string& name,
              std::chrono::steady_clock::time_point t0) {
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    sink_.emplace_back(name, ms);
  }
  std::vector<std::pair<std::string, double>>& sink_;
};

// Counts |0> outcomes over the shot range [lo, hi). Each shot is two counter
// draws: the mixed-register basis state and the Bernoulli outcome.
std::uint64_t count_zeros(const WalkContext& ctx, int k, Mode mode,
                          const RngStream& stream, std::uint64_t lo,
                          std::uint64_t hi, int m_prime_stat, int qubit_cap,
                          double purified_prob) {
  const int n = ctx.n();
  const int mp = ctx.m_prime();
  std::uint64_t zeros = 0;
  for (std::uint64_t s = lo; s < hi; ++s) {
    double p0 = 0.5;
    switch (mode) {
      case Mode::kReduced: {
        const std::uint64_t x = stream.bitfield(2 * s, n);
        const double raw = reduced_shot_p0(ctx, k, x, qubit_cap);
        // Marginal DQC1 statistics: the l != 0 slices of the mixed ancilla
        // register contribute even coins, so the informative bias is diluted
        // by 2^-m'.
        p0 = 0.5 + (raw - 0.5) * std::ldexp(1.0, -m_prime_stat);
        break;
      }
      case Mode::kBasisSampled: {
        const std::uint64_t r = stream.bitfield(2 * s, n + 2 * mp);
        const std::uint64_t x = r >> (2 * mp);
        const std::uint64_t l1 = (r >> mp) & ((std::uint64_t{1} << mp) - 1);
        const std::uint64_t l2 = r & ((std::uint64_t{1} << mp) - 1);
        p0 = basis_sampled_shot_p0(ctx, k, x, l1, l2, qubit_cap);
        break;
      }
      case Mode::kPurified:
        p0 = purified_prob;
        break;
      case Mode::kAnalytic:
        break;  // unreachable
    }
    if (stream.uniform(2 * s + 1) < p0) ++zeros;
  }
  return zeros;
}

}  // namespace

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::kAnalytic: return "analytic";
    case Mode::kReduced: return "reduced";
    case Mode::kBasisSampled: return "basis-sampled";
    case Mode::kPurified: return "purified";
  }
  return "?";
}

ChiEstimate estimate_chi(const WalkContext& ctx, int k,
                         const RngStream& stream, const ChiShotOptions& opts) {
  ChiEstimate est;
  est.k = k;
  est.mode = opts.mode;
  if (opts.mode == Mode::kAnalytic) {
    est.value = projected_chi(ctx, k, opts.qubit_cap);
    return est;
  }
  if (opts.shots == 0)
    throw std::invalid_argument("estimate_chi: sampling mode needs shots >= 1");

  // Forced m' statistics are a reduced-mode device for reproducing the
  // published tables; the physical modes always use the faithful width.
  const int m_prime_stat =
      (opts.mode == Mode::kReduced && opts.m_prime_stat > 0)
          ? opts.m_prime_stat
          : ctx.m_prime();

  double purified_prob = 0.5;
  if (opts.mode == Mode::kPurified)
    purified_prob = purified_p0(ctx, k, opts.qubit_cap);

  const std::uint64_t shots = opts.shots;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_workers(opts.workers),
                                               std::max<std::uint64_t>(shots / 256, 1)));
  std::uint64_t zeros = 0;
  if (workers <= 1) {
    zeros = count_zeros(ctx, k, opts.mode, stream, 0, shots, m_prime_stat,
                        opts.qubit_cap, purified_prob);
  } else {
    std::vector<std::uint64_t> partial(static_cast<std::size_t>(workers), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = shots * static_cast<std::uint64_t>(w) /
                               static_cast<std::uint64_t>(workers);
      const std::uint64_t hi = shots * static_cast<std::uint64_t>(w + 1) /
                               static_cast<std::uint64_t>(workers);
      pool.emplace_back([&, w, lo, hi] {
        partial[static_cast<std::size_t>(w)] =
            count_zeros(ctx, k, opts.mode, stream, lo, hi, m_prime_stat,
                        opts.qubit_cap, purified_prob);
      });
    }
    for (auto& t : pool) t.join();
    // Integer counts: the reduction is exact whatever the worker count.
    for (auto z : partial) zeros += z;
  }

  const double d =
      (2.0 * static_cast<double>(zeros) - static_cast<double>(shots)) /
      static_cast<double>(shots);
  const double scale = std::ldexp(1.0, ctx.n() + m_prime_stat);
  est.value = scale * d;
  est.std_error =
      scale * std::sqrt(std::max(0.0, 1.0 - d * d) / static_cast<double>(shots));
  est.shots_used = shots;
  return est;
}

namespace {

std::vector<std::uint64_t> split_shots(std::uint64_t Q, int K, Split split,
                                       const ChebyshevBudget& budget,
                                       bool per_k) {
  std::vector<std::uint64_t> shots(static_cast<std::size_t>(K), 0);
  if (K == 0) return shots;
  if (per_k) {
    std::fill(shots.begin(), shots.end(), Q);
    return shots;
  }
  if (split == Split::kEven) {
    const std::uint64_t each = Q / static_cast<std::uint64_t>(K);
    std::fill(shots.begin(), shots.end(), each);
    shots[0] += Q - each * static_cast<std::uint64_t>(K);
    return shots;
  }
  // Weight-proportional to I_k(beta_eff); remainder to the largest fractions.
  double total = 0.0;
  for (int k = 1; k <= K; ++k) total += budget.bessel[k];
  std::vector<double> frac(static_cast<std::size_t>(K));
  std::uint64_t assigned = 0;
  for (int k = 1; k <= K; ++k) {
    const double ideal =
        total > 0.0 ? static_cast<double>(Q) * budget.bessel[k] / total
                    : static_cast<double>(Q) / K;
    shots[static_cast<std::size_t>(k - 1)] =
        static_cast<std::uint64_t>(std::floor(ideal));
    frac[static_cast<std::size_t>(k - 1)] = ideal - std::floor(ideal);
    assigned += shots[static_cast<std::size_t>(k - 1)];
  }
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)]; });
  for (std::uint64_t r = 0; r < Q - assigned; ++r)
    ++shots[static_cast<std::size_t>(order[static_cast<std::size_t>(r) % static_cast<std::size_t>(K)])];
  return shots;
}

}  // namespace

EstimateReport estimate_partition(const MrfModel& model,
                                  const EstimatorConfig& config) {
  if (config.beta < 0.0)
    throw std::invalid_argument("estimate_partition: beta < 0");
  EstimateReport report;
  StageTimer timer(report.wall_ms);

  report.model_digest = hex64(fnv1a(serialize(model)));
  report.mode = config.mode;
  report.seed = config.seed;

  const MrfModel norm = timer.run("normalize", [&] { return normalize(model); });
  const Lcu lcu = timer.run("decompose", [&] { return decompose(norm); });
  const WalkContext ctx = make_walk_context(lcu);

  report.n = norm.n;
  report.m = lcu.m;
  report.m_prime = lcu.m_prime();
  report.m_prime_stat =
      (config.mode == Mode::kReduced && config.paper_m_prime) ? norm.n + 1
                                                              : lcu.m_prime();

  const int m_for_K = config.paper_m_prime ? norm.n : lcu.m;
  const int K = config.K_override
                    ? *config.K_override
                    : truncation_order(m_for_K, config.eps_abs, config.k_mode);
  if (K < 0) throw std::invalid_argument("estimate_partition: K < 0");

  std::uint64_t Q = 0;
  if (config.Q_override) {
    Q = *config.Q_override;
    if (Q == 0) throw std::invalid_argument("estimate_partition: Q = 0");
  } else {
    const SampleBudget sb =
        sample_budget(norm.n, report.m_prime_stat, std::max(K, 1),
                      config.delta, config.eps_abs, config.log_mode);
    if (sb.saturated)
      throw CapacityError(
          "estimate_partition: theoretical Q exceeds 2^63; pass an explicit "
          "shot budget");
    Q = sb.q;
  }

  report.budget = timer.run("budget", [&] {
    ChebyshevBudget b = make_budget(K, Q, config.beta * norm.scale,
                                    config.eps_abs, config.delta);
    b.k_mode = config.k_mode;
    b.log_mode = config.log_mode;
    return b;
  });

  const std::vector<std::uint64_t> shots =
      split_shots(Q, K, config.split, report.budget, config.budget_per_k);

  std::vector<double> chi_values(static_cast<std::size_t>(K), 0.0);
  for (int k = 1; k <= K; ++k) {
    ChiShotOptions opts;
    opts.shots = shots[static_cast<std::size_t>(k - 1)];
    opts.mode = config.mode;
    opts.workers = config.workers;
    opts.m_prime_stat = config.paper_m_prime ? norm.n + 1 : -1;
    opts.qubit_cap = config.qubit_cap;
    const RngStream stream =
        RngStream(config.seed).fold({stream_tag::kShot, static_cast<std::uint64_t>(k)});
    const ChiEstimate est = timer.run("chi_" + std::to_string(k), [&] {
      return estimate_chi(ctx, k, stream, opts);
    });
    chi_values[static_cast<std::size_t>(k - 1)] = est.value;
    report.chi.push_back(est);
  }

  report.z_hat = assemble_trace(norm.n, report.budget, chi_values);

  if (norm.n <= config.oracle_cap) {
    const double z = timer.run("oracle", [&] {
      return exact_partition(norm, config.beta, config.oracle_cap);
    });
    report.z_exact = z;
    report.rel_error = std::abs(report.z_hat - z) / z;
  }
  return report;
}

std::string report_to_json(const EstimateReport& report,
                           bool include_timings) {
  nlohmann::json j;
  j["schema"] = "qpfe-report-v1";
  j["model_digest"] = report.model_digest;
  j["n"] = report.n;
  j["m"] = report.m;
  j["m_prime"] = report.m_prime;
  j["m_prime_stat"] = report.m_prime_stat;
  j["mode"] = mode_name(report.mode);
  j["seed"] = report.seed;
  j["K"] = report.budget.K;
  j["Q"] = report.budget.Q.q;
  j["beta_eff"] = report.budget.beta_eff;
  j["eps_abs"] = report.budget.eps_abs;
  j["delta"] = report.budget.delta;
  nlohmann::json chis = nlohmann::json::array();
  for (const auto& c : report.chi)
    chis.push_back({{"k", c.k},
                    {"value", c.value},
                    {"std_error", c.std_error},
                    {"shots", c.shots_used}});
  j["chi"] = chis;
  j["z_hat"] = report.z_hat;
  if (report.z_exact) j["z_exact"] = *report.z_exact;
  if (report.rel_error) {
    j["rel_error"] = *report.rel_error;
    j["rel_error_pct"] = *report.rel_error * 100.0;
  }
  nlohmann::json walls = nlohmann::json::array();
  for (const auto& [stage, ms] : report.wall_ms)
    walls.push_back({{"stage", stage}, {"ms", include_timings ? ms : 0.0}});
  j["wall_ms"] = walls;
  return j.dump(2) + "\n";
}

std::string report_csv_header() {
  return "n,m,m_prime,K,Q,mode,seed,z_hat,z_exact,rel_error_pct,wall_ms";
}

std::string report_csv_row(const EstimateReport& report,
                           bool include_timings) {
  double total_ms = 0.0;
  for (const auto& [stage, ms] : report.wall_ms) total_ms += ms;
  std::ostringstream os;
  os << report.n << ',' << report.m << ',' << report.m_prime << ','
     << report.budget.K << ',' << report.budget.Q.q << ','
     << mode_name(report.mode) << ',' << report.seed << ','
     << format_double(report.z_hat) << ','
     << (report.z_exact ? format_double(*report.z_exact) : "") << ','
     << (report.rel_error ? format_double(*report.rel_error * 100.0) : "")
     << ',' << (include_timings ? format_double(total_ms) : "0");
  return os.str();
}

CellSummary run_cell(int n, std::uint64_t Q, int K, int graphs, int seeds,
                     const EstimatorConfig& config, double density) {
  if (n < 1 || Q < 1 || K < 1 || graphs < 1 || seeds < 1)
    throw std::invalid_argument("run_cell: parameters must be positive");
  const RngStream master(config.seed);
  double sum = 0.0;
  int count = 0;
  for (int g = 0; g < graphs; ++g) {
    const std::uint64_t graph_seed =
        master.fold({stream_tag::kGraph, static_cast<std::uint64_t>(g)}).bits(0);
    const MrfModel model = random_model(n, graph_seed, density);
    for (int s = 0; s < seeds; ++s) {
      EstimatorConfig cfg = config;
      cfg.K_override = K;
      cfg.Q_override = Q;
      cfg.seed = master
                     .fold({stream_tag::kSeed, static_cast<std::uint64_t>(g),
                            static_cast<std::uint64_t>(s)})
                     .bits(0);
      const EstimateReport r = estimate_partition(model, cfg);
      if (!r.rel_error)
        throw CapacityError("run_cell: exact oracle unavailable at this n");
      sum += *r.rel_error * 100.0;
      ++count;
    }
  }
  return {sum / count, count};
}

}  // namespace qpfe
