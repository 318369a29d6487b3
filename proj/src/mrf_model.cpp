#include "qpfe/mrf_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qpfe/errors.hpp"
#include "qpfe/rng.hpp"

namespace qpfe {

double MrfModel::sum_abs_theta() const {
  double s = 0.0;
  for (const auto& e : theta) s += std::abs(e.weight);
  return s;
}

bool MrfModel::is_normalized(double tol) const {
  return std::abs(sum_abs_theta() - 1.0) <= tol;
}

MrfModel parse_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("theta"))
    throw FormatError("model file: expected object with \"n\" and \"theta\"");
  if (!j["n"].is_number_integer())
    throw FormatError("model file: \"n\" must be an integer");
  const long long n = j["n"].get<long long>();
  if (n <= 0) throw FormatError("model file: n must be positive");
  if (n > 62) throw FormatError("model file: n too large");
  if (!j["theta"].is_array())
    throw FormatError("model file: \"theta\" must be an array");

  MrfModel model;
  model.n = static_cast<int>(n);
  std::set<std::pair<int, int>> seen;
  for (const auto& t : j["theta"]) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
        !t[1].is_number_integer() || !t[2].is_number())
      throw FormatError("model file: theta entries must be [i, j, value]");
    const long long i1 = t[0].get<long long>();
    const long long j1 = t[1].get<long long>();
    const double w = t[2].get<double>();
    if (i1 < 1 || j1 < 1 || i1 > n || j1 > n)
      throw FormatError("model file: index out of range in theta entry");
    if (i1 > j1)
      throw FormatError(
          "model file: lower-triangle entry (i > j); store upper triangle only");
    if (!std::isfinite(w))
      throw FormatError("model file: non-finite weight");
    if (!seen.insert({static_cast<int>(i1), static_cast<int>(j1)}).second)
      throw FormatError("model file: duplicate theta entry");
    if (w == 0.0) continue;  // zero weights would only produce dead LCU terms
    model.theta.push_back(
        {static_cast<int>(i1 - 1), static_cast<int>(j1 - 1), w});
  }
  if (model.theta.empty())
    throw FormatError("model file: all-zero theta (normalization undefined)");
  std::sort(model.theta.begin(), model.theta.end(),
            [](const ThetaEntry& a, const ThetaEntry& b) {
              return std::tie(a.i, a.j) < std::tie(b.i, b.j);
            });
  return model;
}

std::string serialize(const MrfModel& model) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : model.theta)
    entries.push_back({e.i + 1, e.j + 1, e.weight});
  nlohmann::json j;
  j["n"] = model.n;
  j["theta"] = entries;
  return j.dump(2) + "\n";
}

double energy(const MrfModel& model, std::uint64_t config) {
  if (model.n < 64 && config >> model.n)
    throw std::invalid_argument("energy: config outside 2^n range");
  double s = 0.0;
  for (const auto& e : model.theta)
    if ((config >> e.i) & (config >> e.j) & 1ULL) s += e.weight;
  return s;
}

double energy(const MrfModel& model, const std::vector<int>& config) {
  if (static_cast<int>(config.size()) != model.n)
    throw std::invalid_argument("energy: config length != n");
  std::uint64_t x = 0;
  for (int i = 0; i < model.n; ++i)
    if (config[i]) x |= 1ULL << i;
  return energy(model, x);
}

MrfModel normalize(const MrfModel& model) {
  const double s = model.sum_abs_theta();
  if (s <= 0.0)
    throw std::invalid_argument("normalize: all-zero theta");
  MrfModel out = model;
  for (auto& e : out.theta) e.weight /= s;
  out.scale = model.scale * s;
  return out;
}

MrfModel random_model(int n, std::uint64_t seed, double density) {
  if (n < 1) throw std::invalid_argument("random_model: n must be >= 1");
  if (!(density > 0.0 && density <= 1.0))
    throw std::invalid_argument("random_model: density must be in (0,1]");

  for (std::uint64_t attempt = 0;; ++attempt) {
    const RngStream key =
        RngStream(seed).fold({stream_tag::kModel, attempt});
    MrfModel model;
    model.n = n;
    std::uint64_t c = 0;
    bool degenerate = false;
    for (int i = 0; i < n; ++i) {
      const double w = 2.0 * key.uniform(c++) - 1.0;
      degenerate |= w == 0.0;
      model.theta.push_back({i, i, w});
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double present = key.uniform(c++);
        const double w = 2.0 * key.uniform(c++) - 1.0;
        if (present < density) {
          degenerate |= w == 0.0;
          model.theta.push_back({i, j, w});
        }
      }
    }
    if (degenerate || !(model.sum_abs_theta() > 0.0)) continue;
    std::sort(model.theta.begin(), model.theta.end(),
              [](const ThetaEntry& a, const ThetaEntry& b) {
                return std::tie(a.i, a.j) < std::tie(b.i, b.j);
              });
    MrfModel out = normalize(model);
    out.scale = 1.0;  // the drawn instance is defined as already normalized
    return out;
  }
}

}  // namespace qpfe
