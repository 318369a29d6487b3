#include "qpfe/pauli_lcu.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qpfe/errors.hpp"
#include "qpfe/format.hpp"

namespace qpfe {

std::vector<int> SignedZTerm::support() const {
  std::vector<int> out;
  for (int i = 0; i < 64; ++i)
    if ((support_mask >> i) & 1ULL) out.push_back(i);
  return out;
}

std::size_t Lcu::raw_term_count() const {
  std::size_t c = 0;
  for (const auto& t : terms)
    if (!t.padding) ++c;
  return c;
}

double Lcu::sum_weights() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.weight;
  return s;
}

Lcu decompose(const MrfModel& model) {
  if (!model.is_normalized())
    throw std::invalid_argument("decompose: model must be normalized");

  Lcu lcu;
  lcu.n = model.n;
  lcu.scale = model.scale;

  // theta is sorted by (i, j); nodes first, then edges, keeps the published
  // term order: nodes ascending, edges (i, j) lexicographic.
  auto emit = [&](int sign, std::uint64_t mask, double w) {
    lcu.terms.push_back({sign, mask, w, false});
  };
  for (const auto& e : model.theta) {
    if (e.i != e.j) continue;
    const int s = e.weight > 0 ? +1 : -1;
    const double w = std::abs(e.weight) / 2.0;
    emit(-s, 0, w);
    emit(+s, 1ULL << e.i, w);
  }
  for (const auto& e : model.theta) {
    if (e.i == e.j) continue;
    const int s = e.weight > 0 ? +1 : -1;
    const double w = std::abs(e.weight) / 4.0;
    emit(-s, 0, w);
    emit(+s, 1ULL << e.i, w);
    emit(+s, 1ULL << e.j, w);
    emit(-s, (1ULL << e.i) | (1ULL << e.j), w);
  }

  const std::size_t raw = lcu.terms.size();
  lcu.m = raw <= 1 ? 0 : std::bit_width(raw - 1);
  while (lcu.terms.size() < (std::size_t{1} << lcu.m))
    lcu.terms.push_back({+1, 0, 0.0, true});
  return lcu;
}

Eigen::VectorXd diagonal(const Lcu& lcu, int cap) {
  if (lcu.n > cap)
    throw CapacityError("diagonal: n exceeds enumeration cap " +
                        std::to_string(cap));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(std::int64_t{1} << lcu.n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << lcu.n); ++x) {
    double v = 0.0;
    for (const auto& t : lcu.terms)
      v += t.weight * static_cast<double>(term_eigenvalue(t, x));
    diag[static_cast<std::int64_t>(x)] = v;
  }
  return diag;
}

Eigen::VectorXd amplitudes(const Lcu& lcu) {
  Eigen::VectorXd a(static_cast<std::int64_t>(lcu.terms.size()));
  for (std::size_t l = 0; l < lcu.terms.size(); ++l)
    a[static_cast<std::int64_t>(l)] = std::sqrt(lcu.terms[l].weight);
  return a;
}

std::string dump_lcu(const Lcu& lcu) {
  std::ostringstream os;
  os << "{\n  \"n\": " << lcu.n << ",\n  \"m\": " << lcu.m
     << ",\n  \"raw_terms\": " << lcu.raw_term_count()
     << ",\n  \"sum_weights\": " << format_double(lcu.sum_weights())
     << ",\n  \"terms\": [\n";
  for (std::size_t l = 0; l < lcu.terms.size(); ++l) {
    const auto& t = lcu.terms[l];
    os << "    {\"sign\": " << (t.sign > 0 ? "1" : "-1") << ", \"support\": [";
    const auto sup = t.support();
    for (std::size_t i = 0; i < sup.size(); ++i)
      os << (i ? ", " : "") << sup[i];
    os << "], \"weight\": " << format_double(t.weight)
       << (t.padding ? ", \"padding\": true}" : "}")
       << (l + 1 < lcu.terms.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

}  // namespace qpfe
