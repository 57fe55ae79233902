#pragma once

#include "envkp/bloch.hpp"
#include "envkp/dynamics.hpp"
#include "envkp/envelope.hpp"
#include "envkp/harness.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace envkp {

/// Envelope snapshot file, little-endian:
///   "ENVF" | int32 d | float64 eps | int32 N | int32 m | int32 q | float64 time
///   | N * m^d complex64 (float32 re, float32 im), band-major, k-grid points in lexicographic order.
struct Snapshot {
  int dim = 0;
  double eps = 0.0;
  int n_bands = 0;
  int m = 0;
  int q = 0;
  double time = 0.0;
  Eigen::MatrixXcd values;
};

void write_snapshot(const std::string& path, const EnvelopeField& env);
Snapshot read_snapshot(const std::string& path);
/// Reads a snapshot and attaches it to grid; throws GridMismatch if the header disagrees.
EnvelopeField load_field(const std::string& path, const GridPtr& grid);

/// CSV "k_1,..,k_d,n,abs2" with 1-based n.
void write_density_csv(const std::string& path, const EnvelopeField& env);

/// Writes frame_NNNN.envf per snapshot plus metadata.json (scheme, dt, eps, N, times, norms).
void write_trajectory(const std::string& dir, const Trajectory& traj, const std::string& scheme, double dt);

/// Band energies lambda_n(xi) on an n_per_dim^d sample of the zone, from the k.p matrix.
struct BandTable {
  std::vector<Eigen::VectorXd> xi;
  /// lambdas[i] holds the eigenvalues at xi[i] in increasing order.
  std::vector<Eigen::VectorXd> lambdas;
};

BandTable sample_bands(const BandBasis& bb, int n_per_dim);
/// CSV "xi_1,..,xi_d,n,lambda" with 1-based n.
void write_bands_csv(const std::string& path, const BandTable& table);
/// {"energies", "inverse_mass", "momentum_abs"} per band.
nlohmann::json bands_json(const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses);

nlohmann::json report_json(const SweepResult& result);
/// CSV "quantity,eps,t,error" for every table entry.
void write_report_csv(const std::string& path, const SweepResult& result);

void write_json(const std::string& path, const nlohmann::json& j);
void write_text(const std::string& path, const std::string& text);

}  // namespace envkp
