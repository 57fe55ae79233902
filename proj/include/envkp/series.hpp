#pragma once

#include "envkp/lattice.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace envkp {

/// One term c * exp(i kappa_j . x) * exp(i (L* z) . z_cell) of a two-scale Fourier sum,
/// with kappa_j = L* j / box_cells a frequency of the macroscopic torus.
struct SeriesTerm {
  IntVec macro;
  IntVec cell;
  std::complex<double> c;
};

/// Finite two-scale Fourier sum V(x, z). Used for external potentials and, with cell = 0, for
/// macroscopic test functions.
struct ExternalPotentialSpec {
  int dim = 1;
  /// Macroscopic torus side in lattice periods; fixes kappa_j = L* j / box_cells.
  int box_cells = 4;
  std::vector<SeriesTerm> terms;

  Eigen::VectorXd macro_frequency(const LatticeGeometry& geom, const IntVec& j) const;
  std::complex<double> value(const LatticeGeometry& geom, const Eigen::VectorXd& x, const Eigen::VectorXd& z) const;
  /// Largest |z|_inf over cell indices.
  int max_cell_harmonic() const;
  /// Largest |j|_inf over macro indices.
  int max_macro_index() const;
  bool depends_on_cell() const;
  /// Sum of the terms sharing the macro index j, as a function of the cell variable.
  std::complex<double> macro_amplitude(const LatticeGeometry& geom, const IntVec& j, const Eigen::VectorXd& z) const;
  /// Distinct macro indices in first-appearance order.
  std::vector<IntVec> macro_indices() const;

  static ExternalPotentialSpec zero(int dim, int box_cells);
  static ExternalPotentialSpec constant(int dim, int box_cells, double c);
};

using TestFunction = ExternalPotentialSpec;

/// Largest |c(-j,-z) - conj c(j,z)| over all terms.
double hermitian_defect(const ExternalPotentialSpec& v);
/// Throws ConfigInvalid unless the sum is real-valued within tol.
void validate_hermitian(const ExternalPotentialSpec& v, double tol = 1e-12);

}  // namespace envkp
