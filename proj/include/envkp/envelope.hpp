#pragma once

#include "envkp/bloch.hpp"
#include "envkp/fft.hpp"
#include "envkp/kernels.hpp"
#include "envkp/series.hpp"

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace envkp {

/// Periodic macroscopic torus of side box_cells lattice periods, resolved by m = box_cells / eps
/// macro points and q fine samples per scaled cell eps*C.
///
/// Fine points x_s = eps L s / q, s in [0, m q)^d. Fine frequencies k = L* j / (m eps) with
/// j = r + m eta: r in [-floor(m/2), m - floor(m/2))^d labels the envelope k-grid inside B/eps
/// and eta labels the cell harmonic lambda = L* eta.
struct MacroGrid {
  LatticeGeometry geom;
  double eps = 0.0;
  int box_cells = 0;
  int m = 0;
  int q = 0;
  int dim = 0;
  long n_k = 0;
  long n_fine = 0;
  /// Volume element of the fine grid and spacing of the k-grid.
  double dv = 0.0;
  double dk = 0.0;
  std::vector<IntVec> k_index;
  std::vector<Eigen::VectorXd> k_points;
  /// Position of each k-grid point in the macro and fine FFT arrays.
  std::vector<long> macro_pos;
  std::vector<long> fine_pos;
  std::shared_ptr<const FftPlan> fine_fft;
  std::shared_ptr<const FftPlan> macro_fft;

  /// Position in the fine FFT array of the integer frequency j (wrapped modulo m q).
  long fine_position(const IntVec& j) const;
  /// Signed frequency index of fine array position p, in [-mq/2, mq/2).
  IntVec fine_frequency(long p) const;
  Eigen::VectorXd fine_wavevector(long p) const;
  Eigen::VectorXd fine_point(long s) const;
  Eigen::VectorXd macro_point(long p) const;
  /// Fine position of k-grid point r shifted by the cell harmonic eta.
  long shifted_position(long r, const IntVec& eta) const;
};

using GridPtr = std::shared_ptr<const MacroGrid>;

/// eps must equal box_cells / m for an integer m (to 1e-9 relative).
GridPtr make_grid(const LatticeGeometry& geom, double eps, int box_cells, int q);
bool same_grid(const MacroGrid& a, const MacroGrid& b);

/// Band amplitudes g_n(k), one row per band and one column per k-grid point.
struct EnvelopeField {
  GridPtr grid;
  Eigen::MatrixXcd g;
  double time = 0.0;

  int n_bands() const { return static_cast<int>(g.rows()); }
};

EnvelopeField zero_field(const GridPtr& grid, int n_bands);

/// Fine-array positions of r + m eta_b for every k-grid point r and basis vector eta_b.
/// Throws AliasedCell unless q >= 2 cutoff + 2.
kernels::Table band_table(const MacroGrid& grid, const ReciprocalIndexSet& basis);

/// Continuous-normalized Fourier transform of a fine field and its inverse.
Eigen::VectorXcd fine_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& psi);
Eigen::VectorXcd fine_from_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& spectrum);

/// Precomputed band contraction for repeated transforms on one grid.
class BandTransform {
 public:
  BandTransform(const BandBasis& bb, GridPtr grid, int n_bands = -1);

  EnvelopeField decompose(const Eigen::VectorXcd& psi) const;
  Eigen::VectorXcd reconstruct(const EnvelopeField& env) const;
  const GridPtr& grid() const { return grid_; }
  int n_bands() const { return static_cast<int>(coeffs_.rows()); }

 private:
  GridPtr grid_;
  Eigen::MatrixXcd coeffs_;
  kernels::Table table_;
};

EnvelopeField decompose(const Eigen::VectorXcd& psi, const BandBasis& bb, const GridPtr& grid, int n_bands = -1);
Eigen::VectorXcd reconstruct(const EnvelopeField& env, const BandBasis& bb);

/// Envelope functions f_n on the macro points (n_bands x n_k) and back.
Eigen::MatrixXcd envelope_on_macro(const EnvelopeField& env);
EnvelopeField envelope_from_macro(const GridPtr& grid, const Eigen::MatrixXcd& f);
/// Envelope functions f_n sampled on the fine points (n_bands x n_fine).
Eigen::MatrixXcd envelope_on_fine(const EnvelopeField& env);

double l2_norm(const EnvelopeField& env);
double fine_norm(const MacroGrid& grid, const Eigen::VectorXcd& psi);
double sobolev_norm(const EnvelopeField& env, double mu);
/// Discrete H^mu norm of a fine field computed from its spectrum.
double fine_sobolev_norm(const MacroGrid& grid, const Eigen::VectorXcd& psi, double mu);
/// Inner product sum_n <g_n, h_n> with the k-grid measure.
std::complex<double> inner(const EnvelopeField& a, const EnvelopeField& b);
std::complex<double> fine_inner(const MacroGrid& grid, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Zeroes every k-grid component outside gamma*B.
EnvelopeField truncate(const EnvelopeField& env, double gamma);
/// Same for a scalar spectrum on the k-grid.
Eigen::VectorXcd truncate_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& spectrum, double gamma);
/// Constant C in |f - T_gamma f|_{H^s} <= C gamma^{-mu} |f|_{H^{s+mu}}.
double truncation_constant(const LatticeGeometry& geom, double mu);

/// V(x, x/eps) on the fine points, using exact integer phases.
Eigen::VectorXcd sample_fine(const ExternalPotentialSpec& v, const MacroGrid& grid);
/// Macroscopic part (cell index ignored, must be zero) on the macro points.
Eigen::VectorXcd sample_macro(const TestFunction& theta, const MacroGrid& grid);

/// int theta |psi|^2 on the fine grid.
double weighted_mass(const MacroGrid& grid, const Eigen::VectorXcd& psi, const TestFunction& theta);
/// sum_n int theta |f_n|^2, evaluated on the fine grid so the quadrature is exact.
double weighted_band_mass(const EnvelopeField& env, const TestFunction& theta);
/// int theta (|psi|^2 - sum_n |f_n|^2).
double weighted_density_gap(const Eigen::VectorXcd& psi, const EnvelopeField& env, const TestFunction& theta);

/// Copies env onto a finer k-grid with the same k spacing; new points are zero.
EnvelopeField embed(const EnvelopeField& env, const GridPtr& target);

}  // namespace envkp
