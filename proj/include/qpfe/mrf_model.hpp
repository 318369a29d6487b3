#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qpfe {

inline constexpr int kDefaultEnumerationCap = 24;

/// One upper-triangular weight of the quadratic form: i == j is a node
/// weight, i < j an edge weight. Indices are 0-based internally.
struct ThetaEntry {
  int i = 0;
  int j = 0;
  double weight = 0.0;
};

/// Binary pairwise MRF energy F(x) = x^T Theta x over x in {0,1}^n.
///
/// Entries are kept sorted by (i, j) and zero weights are dropped, so two
/// models with the same support compare entry-for-entry. `scale` carries the
/// |theta| mass of the original model once normalize() has divided it out;
/// a model built normalized has scale 1.
struct MrfModel {
  int n = 0;
  std::vector<ThetaEntry> theta;  // sorted by (i, j), weights nonzero
  double scale = 1.0;

  double sum_abs_theta() const;
  bool is_normalized(double tol = 1e-9) const;
};

/// Parses the model file format: {"n": N, "theta": [[i, j, w], ...]} with
/// 1-indexed i <= j. Rejects duplicates, lower-triangle entries, indices out
/// of range, non-finite weights, n <= 0 and an all-zero theta.
MrfModel parse_model(const std::string& text);

/// Serializes with entries sorted by (i, j), 1-indexed, so that
/// parse_model(serialize(m)) round-trips byte-stably.
std::string serialize(const MrfModel& model);

/// F(x) = sum of entries whose index pair is contained in the set bits of
/// config. config must lie below 2^n.
double energy(const MrfModel& model, std::uint64_t config);

/// Same, from an explicit bit vector of length n (checked).
double energy(const MrfModel& model, const std::vector<int>& config);

/// Divides theta by s = sum|theta| and multiplies scale by s, so that
/// energy(normalize(m), x) * s == energy(m, x). Rejects all-zero theta.
MrfModel normalize(const MrfModel& model);

/// Deterministic random instance: node weights always present, each edge kept
/// with probability `density`, weights uniform on [-1, 1], then normalized.
/// The draw is a pure function of (n, seed, density); the returned model has
/// scale 1 (it is defined as already normalized, matching the sum|theta| = 1
/// convention of the ensemble).
MrfModel random_model(int n, std::uint64_t seed, double density = 1.0);

}  // namespace qpfe
