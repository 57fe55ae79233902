#include "envkp/lattice.hpp"

#include "envkp/error.hpp"

#include <cmath>
#include <numbers>

namespace envkp {

namespace {
// Slack applied to zone coordinates so points generated on exact grids keep their
// intended side of the half-open boundary after rounding.
constexpr double kZoneSlack = 1e-12;
}  // namespace

Eigen::VectorXd LatticeGeometry::zone_coords(const Eigen::VectorXd& k, double scale) const {
  return reciprocal_matrix.partialPivLu().solve(k / scale);
}

Eigen::VectorXd LatticeGeometry::reciprocal_vector(const IntVec& z) const {
  Eigen::VectorXd zz(dim);
  for (int i = 0; i < dim; ++i) zz[i] = z[i];
  return reciprocal_matrix * zz;
}

int ReciprocalIndexSet::find(const IntVec& z) const {
  for (int c : z)
    if (std::abs(c) > cutoff) return -1;
  // Lexicographic layout over [-cutoff, cutoff]^d.
  const int side = 2 * cutoff + 1;
  int idx = 0;
  for (int c : z) idx = idx * side + (c + cutoff);
  return idx;
}

LatticeGeometry build_lattice(const Eigen::MatrixXd& direct_matrix) {
  if (direct_matrix.rows() != direct_matrix.cols() || direct_matrix.rows() < 1)
    raise(ErrorKind::InvalidArgument, "direct matrix must be square and non-empty");
  const double det = direct_matrix.determinant();
  if (!(std::abs(det) > 1e-12)) raise(ErrorKind::SingularLattice, "|det L| <= 1e-12");

  LatticeGeometry g;
  g.dim = static_cast<int>(direct_matrix.rows());
  g.direct_matrix = direct_matrix;
  g.reciprocal_matrix = 2.0 * std::numbers::pi * direct_matrix.transpose().inverse();
  g.cell_volume = std::abs(det);
  g.zone_volume = std::abs(g.reciprocal_matrix.determinant());

  // Facet t_i = 1/2 of the parallelepiped B: its distance to the origin is
  // (1/2) / |row_i of (L*)^{-1}|.
  const Eigen::MatrixXd inv = g.reciprocal_matrix.inverse();
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.dim; ++i) r = std::min(r, 0.5 / inv.row(i).norm());
  g.inscribed_radius = r;
  return g;
}

bool in_zone(const LatticeGeometry& geom, const Eigen::VectorXd& k, double scale) {
  if (!(scale > 0.0)) raise(ErrorKind::InvalidArgument, "zone scale must be positive");
  const Eigen::VectorXd t = geom.zone_coords(k, scale);
  for (int i = 0; i < geom.dim; ++i)
    if (t[i] < -0.5 - kZoneSlack || t[i] >= 0.5 - kZoneSlack) return false;
  return true;
}

std::vector<IntVec> integer_box(int dim, int lo, int extent) {
  std::vector<IntVec> out;
  long total = 1;
  for (int i = 0; i < dim; ++i) total *= extent;
  out.reserve(static_cast<std::size_t>(total));
  IntVec z(dim, lo);
  for (long n = 0; n < total; ++n) {
    out.push_back(z);
    for (int i = dim - 1; i >= 0; --i) {
      if (++z[i] < lo + extent) break;
      z[i] = lo;
    }
  }
  return out;
}

ReciprocalIndexSet reciprocal_points(const LatticeGeometry& geom, int cutoff) {
  if (cutoff < 0) raise(ErrorKind::InvalidArgument, "cutoff must be nonnegative");
  ReciprocalIndexSet set;
  set.cutoff = cutoff;
  set.indices = integer_box(geom.dim, -cutoff, 2 * cutoff + 1);
  set.points.reserve(set.indices.size());
  for (const auto& z : set.indices) set.points.push_back(geom.reciprocal_vector(z));
  return set;
}

}  // namespace envkp
