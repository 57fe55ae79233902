#pragma once

#include "envkp/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <utility>
#include <vector>

namespace envkp {

using cdouble = std::complex<double>;

/// Cell potential W(z) = sum_z W_z exp(i (L* z) . z), stored by integer reciprocal index.
struct PeriodicPotentialSpec {
  LatticeGeometry geom;
  std::vector<std::pair<IntVec, cdouble>> coefficients;

  cdouble coefficient(const IntVec& z) const;
  double value(const Eigen::VectorXd& z) const;
  /// Largest |z|_inf among nonzero coefficients.
  int max_harmonic() const;

  static PeriodicPotentialSpec constant(const LatticeGeometry& geom, double c);
};

/// Checks Hermitian symmetry and, if requested, W >= 1 on a dense cell grid.
void validate_periodic(const PeriodicPotentialSpec& w, bool require_lower_bound = true);

struct BandBasis {
  LatticeGeometry geom;
  ReciprocalIndexSet basis;
  int n_bands = 0;
  double gap_tol = 1e-6;
  Eigen::VectorXd energies;
  /// Row n holds the planewave coefficients v_{n, lambda}.
  Eigen::MatrixXcd coeffs;
  /// momentum[i](n, n') = i-th component of P_{nn'}.
  std::vector<Eigen::MatrixXcd> momentum;

  int dim() const { return geom.dim; }
  /// Band basis from given energies and momentum matrices, without planewave content.
  static BandBasis synthetic(const LatticeGeometry& geom, const Eigen::VectorXd& energies,
                             const std::vector<Eigen::MatrixXcd>& momentum);
};

struct FiberSpectrum {
  Eigen::VectorXd xi;
  Eigen::VectorXd lambdas;
  Eigen::MatrixXcd diagonalizer;
};

struct EffectiveMass {
  Eigen::MatrixXd inverse_mass;
  /// Largest magnitude among the dropped terms n' >= n_terms (0 when nothing is dropped).
  double truncation_residual = 0.0;
  /// Largest imaginary part of the symmetrized sum before taking the real part.
  double imag_residual = 0.0;
};

struct FdMass {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
};

struct RadiusScan {
  double r_max = 1.0;
  int n_radial = 200;
  int n_directions = 16;
};

struct BandGrowthReport {
  Eigen::VectorXd xi;
  int n0 = 0;
  double growth_margin = 0.0;
  int growth_band = -1;
  double lower_bound_margin = 0.0;
  int lower_bound_band = -1;
};

/// Copy of bb restricted to its first n bands.
BandBasis leading_bands(const BandBasis& bb, int n);

/// Dense planewave solve of the cell problem. gap_tol <= 0 disables the simplicity check.
BandBasis solve_cell(const PeriodicPotentialSpec& w, int cutoff, int n_bands, double gap_tol = 1e-6);

/// Planewave Hamiltonian 1/2|lambda + k|^2 delta + W_{lambda - lambda'}.
Eigen::MatrixXcd planewave_hamiltonian(const PeriodicPotentialSpec& w, const ReciprocalIndexSet& basis,
                                       const Eigen::VectorXd& k);

Eigen::VectorXd direct_fiber_solve(const PeriodicPotentialSpec& w, int cutoff, const Eigen::VectorXd& k,
                                   int n_bands);

Eigen::MatrixXcd fiber_matrix(const BandBasis& bb, const Eigen::VectorXd& xi);

FiberSpectrum diagonalize_fiber(const BandBasis& bb, const Eigen::VectorXd& xi,
                                const FiberSpectrum* reference = nullptr);

/// Second-order perturbative inverse mass of band n using bands [0, n_terms); n_terms < 0 means all.
EffectiveMass effective_mass(const BandBasis& bb, int n, int n_terms = -1);
std::vector<Eigen::MatrixXd> effective_masses(const BandBasis& bb);

FdMass effective_mass_fd(const BandBasis& bb, int n, double h);

double noncrossing_radius(const BandBasis& bb, int n_check, const RadiusScan& scan = {});

BandGrowthReport band_growth_margin(const BandBasis& bb, const Eigen::VectorXd& xi, double tol = 1e-9);

Eigen::VectorXcd vn_one_coefficients(const BandBasis& bb);

/// Rotates v by a global phase so its largest-magnitude entry (first one on ties) is real positive.
void fix_phase_largest(Eigen::Ref<Eigen::VectorXcd> v);

}  // namespace envkp
