#pragma once

#include "envkp/bloch.hpp"
#include "envkp/dynamics.hpp"
#include "envkp/envelope.hpp"
#include "envkp/potential.hpp"
#include "envkp/series.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace envkp {

struct InitialDatum {
  /// Declared Sobolev index; the algebraic profile sits just inside L^2_mu.
  double mu = 3.0;
  std::vector<int> bands{0};
  std::vector<double> amplitudes{1.0};
  Eigen::VectorXd center;
  /// "algebraic": (1 + |k - k0|^2 / w^2)^(-a) with a = (2 mu + d + 1/2) / 4; "gaussian": exp(-|k - k0|^2 / (2 w^2)).
  std::string profile = "algebraic";
  double width = 1.0;
};

struct ExperimentConfig {
  Eigen::MatrixXd lattice;
  std::vector<std::pair<IntVec, cdouble>> periodic;
  ExternalPotentialSpec external;
  int cutoff = 16;
  int bands = 6;
  double gap_tol = 1e-6;
  int box_cells = 4;
  int q = 36;
  std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125, 0.015625};
  double tau = 0.5;
  int samples = 4;
  double dt_factor = 0.1;
  double dt_max = 0.01;
  InitialDatum initial;
  TestFunction theta;
  /// Fraction of the largest-eps error that the smallest-eps error must fall below (no-rate criteria).
  double trend_threshold = 0.05;
  double slope_tolerance = 0.3;
  std::string output_dir = "out";
  /// Canonical text the hash is computed from.
  std::string canonical;
};

/// Parses an INI-style configuration; relative paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
/// Default experiment: d = 1, period 2 pi, W = 1.5 + 0.5 cos z, N = 6, cutoff 16.
ExperimentConfig default_config();
/// Checks the invariants of the configuration; throws ConfigInvalid.
void validate_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

/// Potential file lines: j_1..j_d z_1..z_d re im; '#' starts a comment.
ExternalPotentialSpec parse_potential(const std::string& text, int dim, int box_cells);
ExternalPotentialSpec load_potential(const std::string& path, int dim, int box_cells);

/// Parses a real number written as a product/quotient of literals and "pi", e.g. "2*pi" or "1/64".
double parse_number(const std::string& token);

LatticeGeometry config_lattice(const ExperimentConfig& cfg);
PeriodicPotentialSpec config_periodic(const ExperimentConfig& cfg);

EnvelopeField initial_envelope(const InitialDatum& init, const GridPtr& grid, int n_bands);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int used = 0;
};

/// Least squares of log(error) against log(eps); errors below 1e-13 are dropped.
FitResult fit_rate(const std::vector<double>& eps, const std::vector<double>& errors);

struct ConvergenceReport {
  std::string quantity;
  std::vector<double> eps;
  std::vector<double> times;
  /// errors[i][t] for eps[i] at times[t].
  std::vector<std::vector<double>> errors;
  std::vector<double> max_error;
  bool has_rate = true;
  double theoretical_slope = 0.0;
  double required_slope = 0.0;
  FitResult fit;
  bool fitted = false;
  bool monotone = false;
  double trend_ratio = 0.0;
  bool pass = false;
  std::string note;
};

struct SweepResult {
  std::vector<ConvergenceReport> reports;
  std::string hash;
  bool pass() const;
};

/// Runs every model at every eps and fits the gap rates. threads > 1 runs eps values concurrently.
SweepResult run_sweep(const ExperimentConfig& cfg, int threads = 1);

/// Builds a report from per-eps error tables: fitted rate when has_rate, otherwise the trend test.
ConvergenceReport make_report(const std::string& quantity, const std::vector<double>& eps,
                              const std::vector<double>& times, const std::vector<std::vector<double>>& errors,
                              bool has_rate, double theoretical_slope, double slope_tolerance,
                              double trend_threshold);

}  // namespace envkp
