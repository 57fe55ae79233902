#pragma once

#include "envkp/bloch.hpp"
#include "envkp/envelope.hpp"
#include "envkp/kernels.hpp"
#include "envkp/series.hpp"

#include <Eigen/Dense>

#include <vector>

namespace envkp {

/// V_{nn'}(x) = sum_j vmat[j](n, n') exp(i kappa_j . x).
struct BandProjectedPotential {
  int n_bands = 0;
  int dim = 1;
  int box_cells = 4;
  std::vector<IntVec> macro;
  std::vector<Eigen::MatrixXcd> vmat;

  Eigen::MatrixXcd value(const LatticeGeometry& geom, const Eigen::VectorXd& x) const;
  /// Keeps only the band-diagonal entries.
  BandProjectedPotential diagonal() const;
  bool is_zero() const;
};

BandProjectedPotential band_project(const ExternalPotentialSpec& v, const BandBasis& bb, int n_bands = -1);

/// V_{nn'} evaluated at every macro point of the grid (exact integer phases).
kernels::Blocks collocate(const BandProjectedPotential& bpp, const MacroGrid& grid);

/// Homogenized operator: multiplication by V_{nn'}(x) at the macro points of the envelope grid.
class CollocatedPotential {
 public:
  CollocatedPotential(const BandProjectedPotential& bpp, GridPtr grid);
  EnvelopeField apply(const EnvelopeField& env) const;
  /// exp(-i tau V(x)) at every macro point.
  kernels::Blocks exponentials(double tau) const;
  const kernels::Blocks& values() const { return values_; }
  const GridPtr& grid() const { return grid_; }
  /// max over macro points of the spectral norm of V(x_p).
  double max_operator_norm() const;

 private:
  GridPtr grid_;
  kernels::Blocks values_;
};

EnvelopeField apply_U0(const EnvelopeField& env, const BandProjectedPotential& bpp);

struct UepsResult {
  EnvelopeField field;
  /// Norm of the part of V psi lost to the retained bands and frequencies.
  double residual = 0.0;
};

/// Exact two-scale operator: reconstruct, multiply by V(x, x/eps) on the fine grid, decompose.
class ExactPotential {
 public:
  ExactPotential(const ExternalPotentialSpec& v, const BandBasis& bb, GridPtr grid, int n_bands = -1);
  UepsResult apply(const EnvelopeField& env) const;
  /// exp(-i tau U) env by a Taylor series summed to machine precision.
  EnvelopeField exponential(const EnvelopeField& env, double tau) const;
  const BandTransform& transform() const { return transform_; }

 private:
  BandTransform transform_;
  Eigen::VectorXcd samples_;
};

UepsResult apply_Ueps(const EnvelopeField& env, const ExternalPotentialSpec& v, const BandBasis& bb);

/// max over a 512^d cell grid of sum_j (1 + |kappa_j|)^mu |sum_z c_{j,z} exp(i lambda_z . z)|.
double w_mu_norm(const ExternalPotentialSpec& v, const LatticeGeometry& geom, double mu);

/// sup |V(x, z)| by sampling the product grid, refined until the change is below 1e-6.
double sup_norm(const ExternalPotentialSpec& v, const LatticeGeometry& geom);

/// Drops macro terms with kappa_j outside B / (3 eps).
ExternalPotentialSpec smooth_potential(const ExternalPotentialSpec& v, const LatticeGeometry& geom, double eps);

struct TwoScaleGap {
  double measured = 0.0;
  double bound = 0.0;
  double residual = 0.0;
  double c_mu = 0.0;
};

/// |U^eps g - U^0 g| against eps^mu c_mu |V|_{W_mu} |g|_{L^2_mu}, c_mu = 4 (3/R)^mu.
/// Throws BoundViolated if measured exceeds bound + residual.
TwoScaleGap two_scale_gap(const ExternalPotentialSpec& v, const BandBasis& bb, const EnvelopeField& env, double mu);

}  // namespace envkp
