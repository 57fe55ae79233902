#pragma once

#include <Eigen/Dense>

#include <vector>

namespace envkp {

using IntVec = std::vector<int>;

/// Direct lattice L (columns are primitive vectors), its reciprocal L* = 2*pi*(L^T)^{-1},
/// and derived volumes of the cell C and Brillouin zone B.
struct LatticeGeometry {
  int dim = 0;
  Eigen::MatrixXd direct_matrix;
  Eigen::MatrixXd reciprocal_matrix;
  double cell_volume = 0.0;
  double zone_volume = 0.0;
  /// Radius of the largest ball centered at 0 inside B.
  double inscribed_radius = 0.0;

  /// Zone coordinates t with k = scale * L* t.
  Eigen::VectorXd zone_coords(const Eigen::VectorXd& k, double scale = 1.0) const;
  /// Reciprocal vector L* z.
  Eigen::VectorXd reciprocal_vector(const IntVec& z) const;
};

/// Reciprocal lattice vectors L* z with |z|_inf <= cutoff, lexicographic in z.
struct ReciprocalIndexSet {
  int cutoff = 0;
  std::vector<IntVec> indices;
  std::vector<Eigen::VectorXd> points;

  int size() const { return static_cast<int>(indices.size()); }
  /// Position of z in the set, or -1.
  int find(const IntVec& z) const;
};

LatticeGeometry build_lattice(const Eigen::MatrixXd& direct_matrix);

/// Half-open membership k in scale*B, i.e. zone coordinates in [-1/2, 1/2)^d.
bool in_zone(const LatticeGeometry& geom, const Eigen::VectorXd& k, double scale = 1.0);

ReciprocalIndexSet reciprocal_points(const LatticeGeometry& geom, int cutoff);

/// Lexicographic enumeration of the integer box [lo, lo+extent)^d, last coordinate fastest.
std::vector<IntVec> integer_box(int dim, int lo, int extent);

}  // namespace envkp
