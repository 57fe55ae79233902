#include "envkp/potential.hpp"

#include "envkp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace envkp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(long v, int side) {
  const long w = v % side;
  return static_cast<int>(w < 0 ? w + side : w);
}

void require_compatible(const ExternalPotentialSpec& v, const MacroGrid& grid) {
  if (v.dim != grid.dim || v.box_cells != grid.box_cells)
    raise(ErrorKind::GridMismatch, "potential torus does not match the grid");
}

}  // namespace

Eigen::MatrixXcd BandProjectedPotential::value(const LatticeGeometry& geom, const Eigen::VectorXd& x) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n_bands, n_bands);
  for (std::size_t t = 0; t < macro.size(); ++t) {
    const double phase = geom.reciprocal_vector(macro[t]).dot(x) / box_cells;
    out += std::polar(1.0, phase) * vmat[t];
  }
  return out;
}

BandProjectedPotential BandProjectedPotential::diagonal() const {
  BandProjectedPotential out = *this;
  for (auto& mat : out.vmat) mat = Eigen::MatrixXcd(mat.diagonal().asDiagonal());
  return out;
}

bool BandProjectedPotential::is_zero() const {
  return std::all_of(vmat.begin(), vmat.end(), [](const Eigen::MatrixXcd& mat) { return mat.norm() == 0.0; });
}

BandProjectedPotential band_project(const ExternalPotentialSpec& v, const BandBasis& bb, int n_bands) {
  if (n_bands < 0) n_bands = bb.n_bands;
  if (n_bands > bb.n_bands) raise(ErrorKind::BasisTooSmall, "projection requests more bands than solved");
  if (v.dim != bb.dim()) raise(ErrorKind::InvalidArgument, "potential and band basis dimensions differ");
  if (v.max_cell_harmonic() > bb.basis.cutoff) {
    std::ostringstream os;
    os << "cell harmonic " << v.max_cell_harmonic() << " exceeds planewave cutoff " << bb.basis.cutoff;
    raise(ErrorKind::AliasedCell, os.str());
  }
  const Eigen::MatrixXcd coeffs = bb.coeffs.topRows(n_bands);
  const int q = bb.basis.size();

  BandProjectedPotential out;
  out.n_bands = n_bands;
  out.dim = v.dim;
  out.box_cells = v.box_cells;
  out.macro = v.macro_indices();
  out.vmat.assign(out.macro.size(), Eigen::MatrixXcd::Zero(n_bands, n_bands));
  for (const auto& term : v.terms) {
    const auto slot = std::find(out.macro.begin(), out.macro.end(), term.macro) - out.macro.begin();
    // Shift matrix S(b', b) = 1 when eta_b' = eta_b + z; cell integral = conj(C) S C^T.
    Eigen::MatrixXcd shifted = Eigen::MatrixXcd::Zero(n_bands, q);
    for (int b = 0; b < q; ++b) {
      IntVec target = bb.basis.indices[b];
      for (int i = 0; i < v.dim; ++i) target[i] += term.cell[i];
      const int bp = bb.basis.find(target);
      if (bp >= 0) shifted.col(b) = coeffs.col(bp);
    }
    out.vmat[slot] += term.c * (shifted.conjugate() * coeffs.transpose());
  }
  return out;
}

kernels::Blocks collocate(const BandProjectedPotential& bpp, const MacroGrid& grid) {
  if (bpp.dim != grid.dim || bpp.box_cells != grid.box_cells)
    raise(ErrorKind::GridMismatch, "projected potential torus does not match the grid");
  const int m = grid.m;
  std::vector<std::complex<double>> roots(m);
  for (int t = 0; t < m; ++t) roots[t] = std::polar(1.0, kTwoPi * t / m);
  kernels::Blocks out(grid.n_k, Eigen::MatrixXcd::Zero(bpp.n_bands, bpp.n_bands));
  for (std::size_t t = 0; t < bpp.macro.size(); ++t) {
    IntVec freq(grid.dim);
    for (int i = 0; i < grid.dim; ++i) freq[i] = wrap(bpp.macro[t][i], m);
    IntVec s(grid.dim, 0);
    for (long p = 0; p < grid.n_k; ++p) {
      long phase = 0;
      for (int i = 0; i < grid.dim; ++i) phase += static_cast<long>(freq[i]) * s[i];
      out[p] += roots[phase % m] * bpp.vmat[t];
      for (int i = grid.dim - 1; i >= 0; --i) {
        if (++s[i] < m) break;
        s[i] = 0;
      }
    }
  }
  for (auto& mat : out) mat = 0.5 * (mat + mat.adjoint()).eval();
  return out;
}

CollocatedPotential::CollocatedPotential(const BandProjectedPotential& bpp, GridPtr grid)
    : grid_(std::move(grid)), values_(collocate(bpp, *grid_)) {}

EnvelopeField CollocatedPotential::apply(const EnvelopeField& env) const {
  if (!same_grid(*env.grid, *grid_)) raise(ErrorKind::GridMismatch, "field grid differs from potential grid");
  if (!values_.empty() && env.n_bands() != values_.front().rows())
    raise(ErrorKind::GridMismatch, "field band count differs from projected potential");
  Eigen::MatrixXcd f = envelope_on_macro(env);
  kernels::block_matvec(values_, f);
  EnvelopeField out = envelope_from_macro(grid_, f);
  out.time = env.time;
  return out;
}

kernels::Blocks CollocatedPotential::exponentials(double tau) const {
  kernels::Blocks out;
  kernels::hermitian_exponentials(values_, tau, out);
  return out;
}

double CollocatedPotential::max_operator_norm() const {
  double worst = 0.0;
  for (const auto& mat : values_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mat, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

EnvelopeField apply_U0(const EnvelopeField& env, const BandProjectedPotential& bpp) {
  return CollocatedPotential(bpp, env.grid).apply(env);
}

ExactPotential::ExactPotential(const ExternalPotentialSpec& v, const BandBasis& bb, GridPtr grid, int n_bands)
    : transform_(bb, std::move(grid), n_bands) {
  const MacroGrid& g = *transform_.grid();
  require_compatible(v, g);
  const int extra = 1 + v.max_macro_index() / g.m;
  const int need = 2 * bb.basis.cutoff + v.max_cell_harmonic() + 1 + extra;
  if (g.q < need) {
    std::ostringstream os;
    os << "q=" << g.q << " aliases the product of cutoff " << bb.basis.cutoff << " modes with the potential (need q >= "
       << need << ")";
    raise(ErrorKind::AliasedCell, os.str());
  }
  samples_ = sample_fine(v, g);
}

UepsResult ExactPotential::apply(const EnvelopeField& env) const {
  const MacroGrid& g = *transform_.grid();
  Eigen::VectorXcd psi = transform_.reconstruct(env);
  kernels::scale_pointwise(samples_, psi);
  UepsResult out{transform_.decompose(psi), 0.0};
  out.field.time = env.time;
  const double full = psi.squaredNorm() * g.dv;
  const double kept = out.field.g.squaredNorm() * g.dk;
  out.residual = std::sqrt(std::max(0.0, full - kept));
  return out;
}

EnvelopeField ExactPotential::exponential(const EnvelopeField& env, double tau) const {
  EnvelopeField sum = env;
  EnvelopeField term = env;
  const double scale = std::max(l2_norm(env), 1e-300);
  for (int k = 1; k < 200; ++k) {
    term = apply(term).field;
    term.g *= std::complex<double>(0.0, -tau / k);
    sum.g += term.g;
    if (l2_norm(term) <= 1e-17 * scale) break;
  }
  sum.time = env.time;
  return sum;
}

UepsResult apply_Ueps(const EnvelopeField& env, const ExternalPotentialSpec& v, const BandBasis& bb) {
  return ExactPotential(v, bb, env.grid, env.n_bands()).apply(env);
}

double w_mu_norm(const ExternalPotentialSpec& v, const LatticeGeometry& geom, double mu) {
  const auto js = v.macro_indices();
  std::vector<double> weights;
  for (const auto& j : js) weights.push_back(std::pow(1.0 + v.macro_frequency(geom, j).norm(), mu));
  if (!v.depends_on_cell()) {
    double sum = 0.0;
    for (std::size_t t = 0; t < js.size(); ++t)
      sum += weights[t] * std::abs(v.macro_amplitude(geom, js[t], Eigen::VectorXd::Zero(v.dim)));
    return sum;
  }
  const int side = 512;
  double worst = 0.0;
  for (const auto& s : integer_box(v.dim, 0, side)) {
    Eigen::VectorXd frac(v.dim);
    for (int i = 0; i < v.dim; ++i) frac[i] = static_cast<double>(s[i]) / side;
    const Eigen::VectorXd z = geom.direct_matrix * frac;
    double sum = 0.0;
    for (std::size_t t = 0; t < js.size(); ++t) sum += weights[t] * std::abs(v.macro_amplitude(geom, js[t], z));
    worst = std::max(worst, sum);
  }
  return worst;
}

double sup_norm(const ExternalPotentialSpec& v, const LatticeGeometry& geom) {
  if (v.terms.empty()) return 0.0;
  auto sample = [&](int side) {
    double worst = 0.0;
    const auto points = integer_box(v.dim, 0, side);
    for (const auto& sx : points) {
      Eigen::VectorXd fx(v.dim);
      for (int i = 0; i < v.dim; ++i) fx[i] = static_cast<double>(sx[i]) / side;
      const Eigen::VectorXd x = v.box_cells * (geom.direct_matrix * fx);
      if (!v.depends_on_cell()) {
        worst = std::max(worst, std::abs(v.value(geom, x, Eigen::VectorXd::Zero(v.dim))));
        continue;
      }
      for (const auto& sz : points) {
        Eigen::VectorXd fz(v.dim);
        for (int i = 0; i < v.dim; ++i) fz[i] = static_cast<double>(sz[i]) / side;
        worst = std::max(worst, std::abs(v.value(geom, x, geom.direct_matrix * fz)));
      }
    }
    return worst;
  };
  const int max_side = v.dim == 1 ? 2048 : 64;
  int side = 16;
  double prev = sample(side);
  while (side < max_side) {
    side *= 2;
    const double next = sample(side);
    const bool settled = std::abs(next - prev) < 1e-6;
    prev = next;
    if (settled) break;
  }
  return prev;
}

ExternalPotentialSpec smooth_potential(const ExternalPotentialSpec& v, const LatticeGeometry& geom, double eps) {
  if (!(eps > 0.0)) raise(ErrorKind::InvalidArgument, "eps must be positive");
  ExternalPotentialSpec out = v;
  out.terms.clear();
  for (const auto& t : v.terms)
    if (in_zone(geom, v.macro_frequency(geom, t.macro), 1.0 / (3.0 * eps))) out.terms.push_back(t);
  return out;
}

TwoScaleGap two_scale_gap(const ExternalPotentialSpec& v, const BandBasis& bb, const EnvelopeField& env, double mu) {
  const MacroGrid& grid = *env.grid;
  const UepsResult exact = apply_Ueps(env, v, bb);
  const EnvelopeField homog = apply_U0(env, band_project(v, bb, env.n_bands()));
  TwoScaleGap out;
  Eigen::MatrixXcd diff = exact.field.g - homog.g;
  out.measured = std::sqrt(diff.squaredNorm() * grid.dk);
  out.residual = exact.residual;
  out.c_mu = 4.0 * std::pow(3.0 / grid.geom.inscribed_radius, mu);
  out.bound = std::pow(grid.eps, mu) * out.c_mu * w_mu_norm(v, grid.geom, mu) * sobolev_norm(env, mu);
  if (out.measured > out.bound + out.residual + 1e-12 * (1.0 + l2_norm(env))) {
    std::ostringstream os;
    os << "two-scale gap " << out.measured << " exceeds bound " << out.bound << " + residual " << out.residual;
    raise(ErrorKind::BoundViolated, os.str());
  }
  return out;
}

}  // namespace envkp
