#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace oracle {

envkp::PeriodicPotentialSpec mathieu() {
  envkp::PeriodicPotentialSpec w;
  w.geom = envkp::build_lattice(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::numbers::pi));
  w.coefficients = {{{0}, 1.5}, {{1}, 0.25}, {{-1}, 0.25}};
  return w;
}

envkp::ExternalPotentialSpec two_scale_potential(int box_cells) {
  envkp::ExternalPotentialSpec v = envkp::ExternalPotentialSpec::zero(1, box_cells);
  v.terms = {{{1}, {0}, 0.25},   {{-1}, {0}, 0.25},  {{1}, {1}, 0.125},
             {{1}, {-1}, 0.125}, {{-1}, {1}, 0.125}, {{-1}, {-1}, 0.125}};
  return v;
}

CellModes fd_cell_modes(const std::function<double(double)>& w, double period, int points, int count) {
  const double h = period / points;
  const double c[4] = {-49.0 / 18.0, 1.5, -3.0 / 20.0, 1.0 / 90.0};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(points, points);
  for (int i = 0; i < points; ++i) {
    a(i, i) = -0.5 * c[0] / (h * h) + w(i * h);
    for (int o = 1; o <= 3; ++o) {
      a(i, (i + o) % points) += -0.5 * c[o] / (h * h);
      a(i, (i - o + points) % points) += -0.5 * c[o] / (h * h);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  CellModes out;
  out.h = h;
  out.values = es.eigenvalues().head(count);
  out.vectors = es.eigenvectors().leftCols(count) / std::sqrt(h);
  return out;
}

cdouble bloch_value(const envkp::BandBasis& bb, int n, const Eigen::VectorXd& z) {
  cdouble sum = 0.0;
  for (int b = 0; b < bb.basis.size(); ++b)
    sum += bb.coeffs(n, b) * std::exp(cdouble(0.0, bb.basis.points[b].dot(z)));
  return sum / std::sqrt(bb.geom.cell_volume);
}

cdouble direct_field_value(const envkp::EnvelopeField& env, const envkp::BandBasis& bb, const Eigen::VectorXd& x) {
  const envkp::MacroGrid& grid = *env.grid;
  const double norm = std::pow(2.0 * std::numbers::pi, -grid.dim / 2.0) * grid.dk;
  cdouble psi = 0.0;
  for (int n = 0; n < env.n_bands(); ++n) {
    cdouble f = 0.0;
    for (long r = 0; r < grid.n_k; ++r) f += env.g(n, r) * std::exp(cdouble(0.0, grid.k_points[r].dot(x)));
    psi += norm * f * std::sqrt(bb.geom.cell_volume) * bloch_value(bb, n, x / grid.eps);
  }
  return psi;
}

Eigen::MatrixXcd quadrature_band_matrix(const envkp::ExternalPotentialSpec& v, const envkp::BandBasis& bb,
                                        const Eigen::VectorXd& x, int points) {
  const int d = bb.dim();
  const int nb = bb.n_bands;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(nb, nb);
  const auto nodes = envkp::integer_box(d, 0, points);
  const double weight = bb.geom.cell_volume / static_cast<double>(nodes.size());
  for (const auto& node : nodes) {
    Eigen::VectorXd t(d);
    for (int i = 0; i < d; ++i) t[i] = static_cast<double>(node[i]) / points;
    const Eigen::VectorXd z = bb.geom.direct_matrix * t;
    const cdouble vz = v.value(bb.geom, x, z);
    Eigen::VectorXcd u(nb);
    for (int n = 0; n < nb; ++n) u[n] = bloch_value(bb, n, z);
    out += weight * vz * u.conjugate() * u.transpose();
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
