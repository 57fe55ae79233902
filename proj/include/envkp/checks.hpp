#pragma once

#include "envkp/envelope.hpp"
#include "envkp/harness.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace envkp {

struct CheckItem {
  std::string name;
  /// Positive when the property holds; the distance to its threshold.
  double margin = 0.0;
  bool pass = false;
  std::string detail;
};

struct CheckReport {
  std::uint64_t seed = 0;
  std::vector<CheckItem> items;
  bool pass() const;
};

/// Complex Gaussian amplitudes damped by (1 + |k|^2)^(-decay/2), normalized to unit L^2 norm.
EnvelopeField random_envelope(const GridPtr& grid, int n_bands, std::mt19937_64& rng, double decay = 2.0);

/// Property battery on the configured system at its largest eps: Parseval and round trip,
/// operator-norm bounds, the small-support identity of the two potential operators,
/// band growth bounds, the two-scale potential bound, and propagator unitarity and reversibility.
CheckReport run_checks(const ExperimentConfig& cfg, std::uint64_t seed, int samples = 20);

}  // namespace envkp
