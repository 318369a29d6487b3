// qpfe: partition-function estimation for binary pairwise MRFs in the
// one-clean-qubit model, with exact brute-force oracles for verification.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qpfe/errors.hpp"
#include "qpfe/estimator.hpp"
#include "qpfe/format.hpp"
#include "qpfe/pauli_lcu.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitUsage = 2;
constexpr int kExitFormat = 3;
constexpr int kExitCapacity = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw qpfe::FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw std::runtime_error("cannot write " + path);
  out << content;
}

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

// The manifest ties every emitted file to the exact parameters that produced
// it. The hash covers the canonical parameter echo, never wall-clock state.
struct Manifest {
  std::string schema;
  nlohmann::json params;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;

  std::string hash() const {
    return hex64(fnv1a(schema + params.dump() + std::to_string(seed)));
  }
  std::string to_json() const {
    nlohmann::json j;
    j["schema"] = schema;
    j["tool_version"] = kToolVersion;
    j["manifest_hash"] = hash();
    j["master_seed"] = seed;
    j["params"] = params;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
  }
};

void emit(const std::string& out_path, const std::string& payload,
          Manifest manifest) {
  if (out_path.empty()) {
    std::cout << payload;
    return;
  }
  manifest.outputs.push_back(out_path);
  write_file(out_path, payload);
  write_file(out_path + ".manifest.json", manifest.to_json());
}

const std::map<std::string, qpfe::Mode> kModeNames = {
    {"analytic", qpfe::Mode::kAnalytic},
    {"reduced", qpfe::Mode::kReduced},
    {"basis-sampled", qpfe::Mode::kBasisSampled},
    {"purified", qpfe::Mode::kPurified}};
const std::map<std::string, qpfe::LogMode> kLogModeNames = {
    {"natural", qpfe::LogMode::kNatural}, {"base10", qpfe::LogMode::kBase10}};
const std::map<std::string, qpfe::KMode> kKModeNames = {
    {"ceil", qpfe::KMode::kCeil}, {"table", qpfe::KMode::kTable}};
const std::map<std::string, qpfe::Split> kSplitNames = {
    {"even", qpfe::Split::kEven},
    {"weighted", qpfe::Split::kWeightProportional}};

struct CommonEstimateFlags {
  double beta = 1.0;
  double eps_abs = 0.1;
  double delta = 0.1;
  qpfe::Mode mode = qpfe::Mode::kReduced;
  qpfe::LogMode log_mode = qpfe::LogMode::kNatural;
  qpfe::KMode k_mode = qpfe::KMode::kCeil;
  qpfe::Split split = qpfe::Split::kEven;
  std::uint64_t seed = 1;
  int workers = 0;
  bool timings = false;
};

void add_common_flags(CLI::App* cmd, CommonEstimateFlags& f) {
  cmd->add_option("--beta", f.beta, "Inverse temperature")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--eps-abs", f.eps_abs, "Absolute series error target");
  cmd->add_option("--delta", f.delta, "Failure probability target");
  cmd->add_option("--mode", f.mode, "Estimation mode")
      ->transform(CLI::CheckedTransformer(kModeNames));
  cmd->add_option("--log-mode", f.log_mode, "Logarithm base in the Q formula")
      ->transform(CLI::CheckedTransformer(kLogModeNames));
  cmd->add_option("--k-mode", f.k_mode, "Rounding mode in the K formula")
      ->transform(CLI::CheckedTransformer(kKModeNames));
  cmd->add_option("--split", f.split, "How a total Q is divided over k")
      ->transform(CLI::CheckedTransformer(kSplitNames));
  cmd->add_option("--seed", f.seed, "Master seed; all randomness derives from it");
  cmd->add_option("--workers", f.workers, "Worker threads (0 = hardware)");
  cmd->add_flag("--timings", f.timings,
                "Include wall-clock timings in output files (non-reproducible)");
}

qpfe::EstimatorConfig to_config(const CommonEstimateFlags& f) {
  qpfe::EstimatorConfig cfg;
  cfg.beta = f.beta;
  cfg.eps_abs = f.eps_abs;
  cfg.delta = f.delta;
  cfg.mode = f.mode;
  cfg.log_mode = f.log_mode;
  cfg.k_mode = f.k_mode;
  cfg.split = f.split;
  cfg.seed = f.seed;
  cfg.workers = f.workers;
  return cfg;
}

// ---------------------------------------------------------------- exact ----

int run_exact(const std::string& model_path, double beta, int cap) {
  const qpfe::MrfModel model =
      qpfe::normalize(qpfe::parse_model(read_file(model_path)));
  std::cout << qpfe::format_sig17(qpfe::exact_partition(model, beta, cap))
            << "\n";
  return 0;
}

// ------------------------------------------------------------------ lcu ----

int run_lcu(const std::string& model_path, const std::string& out) {
  const qpfe::MrfModel model =
      qpfe::normalize(qpfe::parse_model(read_file(model_path)));
  Manifest m{"qpfe-lcu-v1", {{"model", model_path}}, 0, {}};
  emit(out, qpfe::dump_lcu(qpfe::decompose(model)), m);
  return 0;
}

// --------------------------------------------------------------- budget ----

int run_budget(int n, int m_prime, int K_opt, double eps, double delta,
               const std::string& out) {
  const int mp = m_prime > 0 ? m_prime : n + 1;
  std::ostringstream os;
  os << "k_mode,log_mode,K,Q,Q_saturated\n";
  for (const auto& [kname, kmode] : kKModeNames) {
    const int K = K_opt > 0 ? K_opt
                            : qpfe::truncation_order(mp - 1, eps, kmode);
    for (const auto& [lname, lmode] : kLogModeNames) {
      const qpfe::SampleBudget q =
          qpfe::sample_budget(n, mp, K, delta, eps, lmode);
      os << kname << ',' << lname << ',' << K << ',' << q.q << ','
         << (q.saturated ? "1" : "0") << "\n";
    }
  }
  Manifest m{"qpfe-budget-v1",
             {{"n", n}, {"m_prime", mp}, {"K", K_opt}, {"eps_abs", eps},
              {"delta", delta}},
             0,
             {}};
  emit(out, os.str(), m);
  return 0;
}

// ------------------------------------------------------------- estimate ----

int run_estimate(const std::string& model_path, const CommonEstimateFlags& f,
                 int order, std::uint64_t shots, bool per_k,
                 bool paper_m_prime, const std::string& out,
                 const std::string& format) {
  const qpfe::MrfModel model = qpfe::parse_model(read_file(model_path));
  qpfe::EstimatorConfig cfg = to_config(f);
  if (order > 0) cfg.K_override = order;
  if (shots > 0) cfg.Q_override = shots;
  cfg.budget_per_k = per_k;
  cfg.paper_m_prime = paper_m_prime;

  const qpfe::EstimateReport report = qpfe::estimate_partition(model, cfg);

  std::string payload;
  if (format == "csv") {
    payload = qpfe::report_csv_header() + "\n" +
              qpfe::report_csv_row(report, f.timings) + "\n";
  } else {
    payload = qpfe::report_to_json(report, f.timings);
  }
  Manifest m{"qpfe-report-v1",
             {{"model", model_path}, {"mode", qpfe::mode_name(cfg.mode)},
              {"beta", cfg.beta}, {"order", order}, {"shots", shots},
              {"per_k", per_k}, {"paper_m_prime", paper_m_prime}},
             cfg.seed,
             {}};
  emit(out, payload, m);

  double total_ms = 0.0;
  for (const auto& [stage, ms] : report.wall_ms) total_ms += ms;
  std::cerr << "z_hat=" << qpfe::format_double(report.z_hat);
  if (report.z_exact)
    std::cerr << " z_exact=" << qpfe::format_double(*report.z_exact)
              << " rel_error_pct="
              << qpfe::format_double(*report.rel_error * 100.0);
  std::cerr << " wall_ms=" << qpfe::format_double(total_ms) << "\n";
  return 0;
}

// --------------------------------------------------------------- tables ----

void check_desk_scale(const std::vector<int>& sizes,
                      const std::vector<std::uint64_t>& shots, bool full) {
  if (full) return;
  for (int n : sizes)
    if (n < 1 || n > 4)
      throw CLI::ValidationError(
          "sizes beyond 2..4 need --full (desk-scale cap)");
  for (auto q : shots)
    if (q > 100000ULL)
      throw CLI::ValidationError(
          "shots beyond 1e5 per cell need --full (desk-scale cap)");
}

int run_table1(std::vector<int> sizes, std::vector<std::uint64_t> shots_list,
               int graphs, int seeds, int order,
               const CommonEstimateFlags& f, bool faithful_m, bool split_budget,
               double density, bool full, const std::string& out) {
  check_desk_scale(sizes, shots_list, full);
  qpfe::EstimatorConfig cfg = to_config(f);
  cfg.budget_per_k = !split_budget;
  cfg.paper_m_prime = !faithful_m;

  std::ostringstream os;
  os << "n,q_th";
  for (auto q : shots_list) os << ",err_pct_" << q;
  os << "\n";
  for (int n : sizes) {
    const qpfe::SampleBudget q_th = qpfe::sample_budget(
        n, n + 1, order, f.delta, f.eps_abs, qpfe::LogMode::kBase10);
    os << n << ',' << q_th.q;
    for (auto q : shots_list) {
      const qpfe::CellSummary cell =
          qpfe::run_cell(n, q, order, graphs, seeds, cfg, density);
      os << ',' << qpfe::format_double(cell.mean_rel_error_pct);
    }
    os << "\n";
    std::cerr << "table1: n=" << n << " done\n";
  }
  Manifest m{"qpfe-table1-v1",
             {{"sizes", sizes}, {"shots", shots_list}, {"graphs", graphs},
              {"seeds", seeds}, {"K", order}, {"mode", qpfe::mode_name(f.mode)},
              {"paper_m_prime", !faithful_m}, {"per_k", !split_budget},
              {"density", density}},
             f.seed,
             {}};
  emit(out, os.str(), m);
  return 0;
}

int run_table2(std::vector<int> sizes, std::vector<int> k_list,
               std::uint64_t shots, int graphs, int seeds,
               const CommonEstimateFlags& f, bool faithful_m, bool split_budget,
               double density, bool full, const std::string& out) {
  check_desk_scale(sizes, {shots}, full);
  qpfe::EstimatorConfig cfg = to_config(f);
  cfg.budget_per_k = !split_budget;
  cfg.paper_m_prime = !faithful_m;

  std::ostringstream os;
  os << "n,k_th";
  for (int k : k_list) os << ",err_pct_K" << k;
  os << "\n";
  for (int n : sizes) {
    const int k_th = qpfe::truncation_order(n, f.eps_abs, qpfe::KMode::kTable);
    os << n << ',' << k_th;
    for (int K : k_list) {
      const qpfe::CellSummary cell =
          qpfe::run_cell(n, shots, K, graphs, seeds, cfg, density);
      os << ',' << qpfe::format_double(cell.mean_rel_error_pct);
    }
    os << "\n";
    std::cerr << "table2: n=" << n << " done\n";
  }
  Manifest m{"qpfe-table2-v1",
             {{"sizes", sizes}, {"k_list", k_list}, {"shots", shots},
              {"graphs", graphs}, {"seeds", seeds},
              {"mode", qpfe::mode_name(f.mode)},
              {"paper_m_prime", !faithful_m}, {"per_k", !split_budget},
              {"density", density}},
             f.seed,
             {}};
  emit(out, os.str(), m);
  return 0;
}

// ------------------------------------------------------------------ gen ----

int run_gen(int n, std::uint64_t seed, double density,
            const std::string& out) {
  const qpfe::MrfModel model = qpfe::random_model(n, seed, density);
  Manifest m{"qpfe-model-v1",
             {{"n", n}, {"density", density}},
             seed,
             {}};
  emit(out, qpfe::serialize(model), m);
  return 0;
}

// --------------------------------------------------------------- golden ----

int run_golden(const std::string& model_path, double beta, int k_max,
               const std::string& out) {
  const qpfe::MrfModel model =
      qpfe::normalize(qpfe::parse_model(read_file(model_path)));
  nlohmann::json j;
  j["schema"] = "qpfe-golden-v1";
  j["n"] = model.n;
  j["beta"] = beta;
  j["z_exact"] = qpfe::exact_partition(model, beta);
  nlohmann::json chis = nlohmann::json::array();
  for (int k = 0; k <= k_max; ++k) chis.push_back(qpfe::exact_chi(model, k));
  j["chi"] = chis;
  nlohmann::json sk = nlohmann::json::array();
  for (int K = 0; K <= k_max; ++K)
    sk.push_back(qpfe::exact_sk_trace(model, beta, K));
  j["sk_trace"] = sk;
  Manifest m{"qpfe-golden-v1",
             {{"model", model_path}, {"beta", beta}, {"k_max", k_max}},
             0,
             {}};
  emit(out, j.dump(2) + "\n", m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition function estimation of binary pairwise MRFs in the "
               "one-clean-qubit model"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  // exact
  auto* exact = app.add_subcommand("exact", "Exact partition function by enumeration");
  std::string exact_model;
  double exact_beta = 1.0;
  int exact_cap = qpfe::kDefaultEnumerationCap;
  exact->add_option("--model", exact_model, "Model file")->required();
  exact->add_option("--beta", exact_beta)->check(CLI::NonNegativeNumber);
  exact->add_option("--cap", exact_cap, "Enumeration cap (qubits)");

  // estimate
  auto* est = app.add_subcommand("estimate", "DQC1 shot-sampled estimate");
  std::string est_model, est_out, est_format = "json";
  CommonEstimateFlags est_flags;
  int est_order = 0;
  std::uint64_t est_shots = 0;
  bool est_per_k = false, est_paper_mp = false;
  est->add_option("--model", est_model, "Model file")->required();
  add_common_flags(est, est_flags);
  est->add_option("--order", est_order, "Truncation order K override");
  est->add_option("--shots", est_shots, "Shot budget Q override");
  est->add_flag("--per-k", est_per_k, "Interpret Q as a per-k budget");
  est->add_flag("--paper-mprime", est_paper_mp,
                "Run shot statistics under the m' = n + 1 table convention");
  est->add_option("--out", est_out, "Output path (stdout if omitted)");
  est->add_option("--format", est_format)
      ->check(CLI::IsMember({"csv", "json"}));

  // lcu
  auto* lcu = app.add_subcommand("lcu", "Dump the signed Z-string expansion");
  std::string lcu_model, lcu_out;
  lcu->add_option("--model", lcu_model, "Model file")->required();
  lcu->add_option("--out", lcu_out, "Output path (stdout if omitted)");

  // budget
  auto* bud = app.add_subcommand("budget", "Print (K, Q) under all flag combinations");
  int bud_n = 2, bud_mp = 0, bud_K = 0;
  double bud_eps = 0.1, bud_delta = 0.1;
  std::string bud_out;
  bud->add_option("--n", bud_n, "System qubits")->required();
  bud->add_option("--m-prime", bud_mp, "Ancilla register width (default n+1)");
  bud->add_option("--order", bud_K, "K used in the Q formula (default: computed)");
  bud->add_option("--eps-abs", bud_eps);
  bud->add_option("--delta", bud_delta);
  bud->add_option("--out", bud_out);

  // table1
  auto* t1 = app.add_subcommand("table1", "Error vs shot budget Q grid");
  std::vector<int> t1_sizes = {2, 3, 4};
  std::vector<std::uint64_t> t1_shots = {1000, 10000, 100000};
  int t1_graphs = 10, t1_seeds = 1, t1_order = 3;
  bool t1_faithful = false, t1_split = false, t1_full = false;
  double t1_density = 1.0;
  CommonEstimateFlags t1_flags;
  std::string t1_out;
  t1->add_option("--sizes", t1_sizes, "Graph sizes n")->delimiter(',');
  t1->add_option("--shots-list", t1_shots, "Q grid (per k)")->delimiter(',');
  t1->add_option("--graphs", t1_graphs, "Random graphs per cell");
  t1->add_option("--seeds", t1_seeds, "Estimation seeds per graph");
  t1->add_option("--order", t1_order, "Truncation order K");
  t1->add_option("--density", t1_density, "Edge density of random graphs");
  add_common_flags(t1, t1_flags);
  t1->add_flag("--faithful-m", t1_faithful,
               "Use the faithful m' of each instance instead of m' = n + 1");
  t1->add_flag("--split-budget", t1_split,
               "Divide Q over k instead of per-k budgets");
  t1->add_flag("--full", t1_full, "Remove desk-scale caps");
  t1->add_option("--out", t1_out);

  // table2
  auto* t2 = app.add_subcommand("table2", "Error vs truncation order K grid");
  std::vector<int> t2_sizes = {2, 3, 4};
  std::vector<int> t2_klist = {1, 2, 3, 4, 5};
  std::uint64_t t2_shots = 100000;
  int t2_graphs = 10, t2_seeds = 1;
  bool t2_faithful = false, t2_split = false, t2_full = false;
  double t2_density = 1.0;
  CommonEstimateFlags t2_flags;
  std::string t2_out;
  t2->add_option("--sizes", t2_sizes, "Graph sizes n")->delimiter(',');
  t2->add_option("--k-list", t2_klist, "Truncation orders to sweep")->delimiter(',');
  t2->add_option("--shots", t2_shots, "Q per k");
  t2->add_option("--graphs", t2_graphs);
  t2->add_option("--seeds", t2_seeds);
  t2->add_option("--density", t2_density);
  add_common_flags(t2, t2_flags);
  t2->add_flag("--faithful-m", t2_faithful);
  t2->add_flag("--split-budget", t2_split);
  t2->add_flag("--full", t2_full, "Remove desk-scale caps");
  t2->add_option("--out", t2_out);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a random normalized model");
  int gen_n = 3;
  std::uint64_t gen_seed = 1;
  double gen_density = 1.0;
  std::string gen_out;
  gen->add_option("--n", gen_n)->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--density", gen_density);
  gen->add_option("--out", gen_out);

  // golden
  auto* gold = app.add_subcommand("golden", "Emit exact oracle values for fixtures");
  std::string gold_model, gold_out;
  double gold_beta = 1.0;
  int gold_kmax = 8;
  gold->add_option("--model", gold_model)->required();
  gold->add_option("--beta", gold_beta);
  gold->add_option("--k-max", gold_kmax);
  gold->add_option("--out", gold_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*exact) return run_exact(exact_model, exact_beta, exact_cap);
    if (*est)
      return run_estimate(est_model, est_flags, est_order, est_shots,
                          est_per_k, est_paper_mp, est_out, est_format);
    if (*lcu) return run_lcu(lcu_model, lcu_out);
    if (*bud)
      return run_budget(bud_n, bud_mp, bud_K, bud_eps, bud_delta, bud_out);
    if (*t1)
      return run_table1(t1_sizes, t1_shots, t1_graphs, t1_seeds, t1_order,
                        t1_flags, t1_faithful, t1_split, t1_density, t1_full,
                        t1_out);
    if (*t2)
      return run_table2(t2_sizes, t2_klist, t2_shots, t2_graphs, t2_seeds,
                        t2_flags, t2_faithful, t2_split, t2_density, t2_full,
                        t2_out);
    if (*gen) return run_gen(gen_n, gen_seed, gen_density, gen_out);
    if (*gold) return run_golden(gold_model, gold_beta, gold_kmax, gold_out);
  } catch (const qpfe::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const qpfe::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
