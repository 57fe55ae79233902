#include "envkp/envelope.hpp"

#include "envkp/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace envkp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double fourier_norm(int dim) { return std::pow(kTwoPi, -0.5 * dim); }

long flatten(const IntVec& idx, int side) {
  long p = 0;
  for (int v : idx) p = p * side + v;
  return p;
}

IntVec unflatten(long p, int dim, int side) {
  IntVec idx(dim);
  for (int i = dim - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(p % side);
    p /= side;
  }
  return idx;
}

int wrap(long v, int side) {
  const long w = v % side;
  return static_cast<int>(w < 0 ? w + side : w);
}

void require_same(const MacroGrid& a, const MacroGrid& b) {
  if (!same_grid(a, b)) raise(ErrorKind::GridMismatch, "fields live on different grids");
}

void require_fine(const MacroGrid& grid, const Eigen::VectorXcd& psi) {
  if (psi.size() != grid.n_fine) {
    std::ostringstream os;
    os << "fine field has " << psi.size() << " samples, grid expects " << grid.n_fine;
    raise(ErrorKind::GridMismatch, os.str());
  }
}

}  // namespace

long MacroGrid::fine_position(const IntVec& j) const {
  const int side = m * q;
  long p = 0;
  for (int i = 0; i < dim; ++i) p = p * side + wrap(j[i], side);
  return p;
}

IntVec MacroGrid::fine_frequency(long p) const {
  const int side = m * q;
  IntVec j = unflatten(p, dim, side);
  for (int& v : j)
    if (v >= side - side / 2) v -= side;
  return j;
}

Eigen::VectorXd MacroGrid::fine_wavevector(long p) const {
  return geom.reciprocal_vector(fine_frequency(p)) / (m * eps);
}

Eigen::VectorXd MacroGrid::fine_point(long s) const {
  const IntVec idx = unflatten(s, dim, m * q);
  Eigen::VectorXd frac(dim);
  for (int i = 0; i < dim; ++i) frac[i] = static_cast<double>(idx[i]) / q;
  return eps * (geom.direct_matrix * frac);
}

Eigen::VectorXd MacroGrid::macro_point(long p) const {
  const IntVec idx = unflatten(p, dim, m);
  Eigen::VectorXd frac(dim);
  for (int i = 0; i < dim; ++i) frac[i] = idx[i];
  return eps * (geom.direct_matrix * frac);
}

long MacroGrid::shifted_position(long r, const IntVec& eta) const {
  IntVec j = k_index[r];
  for (int i = 0; i < dim; ++i) j[i] += m * eta[i];
  return fine_position(j);
}

GridPtr make_grid(const LatticeGeometry& geom, double eps, int box_cells, int q) {
  if (!(eps > 0.0)) raise(ErrorKind::InvalidArgument, "eps must be positive");
  if (box_cells < 1) raise(ErrorKind::InvalidArgument, "box_cells must be positive");
  if (q < 2) raise(ErrorKind::InvalidArgument, "need at least two samples per cell");
  const double mf = box_cells / eps;
  const long m = std::lround(mf);
  if (m < 1 || std::abs(mf - m) > 1e-9 * mf) {
    std::ostringstream os;
    os << "eps=" << eps << " is not box_cells/m for an integer m (box_cells=" << box_cells << ")";
    raise(ErrorKind::GridMismatch, os.str());
  }
  auto g = std::make_shared<MacroGrid>();
  g->geom = geom;
  g->eps = static_cast<double>(box_cells) / m;
  g->box_cells = box_cells;
  g->m = static_cast<int>(m);
  g->q = q;
  g->dim = geom.dim;
  g->n_k = 1;
  g->n_fine = 1;
  for (int i = 0; i < geom.dim; ++i) {
    g->n_k *= m;
    g->n_fine *= m * q;
  }
  g->dv = std::pow(g->eps, geom.dim) * geom.cell_volume / std::pow(q, geom.dim);
  g->dk = geom.zone_volume / std::pow(static_cast<double>(box_cells), geom.dim);
  g->k_index = integer_box(geom.dim, -static_cast<int>(m / 2), static_cast<int>(m));
  g->k_points.reserve(g->k_index.size());
  g->macro_pos.reserve(g->k_index.size());
  g->fine_pos.reserve(g->k_index.size());
  for (const auto& r : g->k_index) {
    g->k_points.push_back(geom.reciprocal_vector(r) / static_cast<double>(box_cells));
    IntVec wrapped(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) wrapped[i] = wrap(r[i], g->m);
    g->macro_pos.push_back(flatten(wrapped, g->m));
    g->fine_pos.push_back(g->fine_position(r));
  }
  g->fine_fft = fft_plan(std::vector<int>(geom.dim, g->m * q));
  g->macro_fft = fft_plan(std::vector<int>(geom.dim, g->m));
  return g;
}

bool same_grid(const MacroGrid& a, const MacroGrid& b) {
  if (&a == &b) return true;
  return a.dim == b.dim && a.m == b.m && a.q == b.q && a.box_cells == b.box_cells &&
         a.geom.direct_matrix.isApprox(b.geom.direct_matrix, 1e-14);
}

EnvelopeField zero_field(const GridPtr& grid, int n_bands) {
  EnvelopeField env;
  env.grid = grid;
  env.g = Eigen::MatrixXcd::Zero(n_bands, grid->n_k);
  return env;
}

kernels::Table band_table(const MacroGrid& grid, const ReciprocalIndexSet& basis) {
  if (grid.q < 2 * basis.cutoff + 2) {
    std::ostringstream os;
    os << "q=" << grid.q << " cannot resolve cell harmonics up to " << basis.cutoff << " (need q >= "
       << 2 * basis.cutoff + 2 << ")";
    raise(ErrorKind::AliasedCell, os.str());
  }
  const long nq = basis.size();
  kernels::Table table(static_cast<std::size_t>(grid.n_k * nq));
  for (long r = 0; r < grid.n_k; ++r)
    for (long b = 0; b < nq; ++b) table[r * nq + b] = grid.shifted_position(r, basis.indices[b]);
  return table;
}

Eigen::VectorXcd fine_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& psi) {
  require_fine(grid, psi);
  Eigen::VectorXcd out(grid.n_fine);
  grid.fine_fft->forward(psi.data(), out.data());
  out *= fourier_norm(grid.dim) * grid.dv;
  return out;
}

Eigen::VectorXcd fine_from_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& spectrum) {
  require_fine(grid, spectrum);
  Eigen::VectorXcd out(grid.n_fine);
  grid.fine_fft->inverse(spectrum.data(), out.data());
  out *= fourier_norm(grid.dim) * grid.dk;
  return out;
}

BandTransform::BandTransform(const BandBasis& bb, GridPtr grid, int n_bands) : grid_(std::move(grid)) {
  if (n_bands < 0) n_bands = bb.n_bands;
  if (n_bands > bb.n_bands) raise(ErrorKind::BasisTooSmall, "transform requests more bands than solved");
  if (bb.coeffs.cols() != bb.basis.size() || bb.basis.size() == 0)
    raise(ErrorKind::InvalidArgument, "band basis carries no planewave coefficients");
  if (!bb.geom.direct_matrix.isApprox(grid_->geom.direct_matrix, 1e-14))
    raise(ErrorKind::GridMismatch, "band basis and grid use different lattices");
  coeffs_ = bb.coeffs.topRows(n_bands);
  table_ = band_table(*grid_, bb.basis);
}

EnvelopeField BandTransform::decompose(const Eigen::VectorXcd& psi) const {
  const Eigen::VectorXcd spectrum = fine_spectrum(*grid_, psi);
  EnvelopeField env = zero_field(grid_, n_bands());
  kernels::gather_bands(coeffs_, table_, spectrum, env.g);
  return env;
}

Eigen::VectorXcd BandTransform::reconstruct(const EnvelopeField& env) const {
  require_same(*grid_, *env.grid);
  if (env.n_bands() != n_bands()) raise(ErrorKind::GridMismatch, "field band count differs from transform");
  Eigen::VectorXcd spectrum = Eigen::VectorXcd::Zero(grid_->n_fine);
  kernels::scatter_bands(coeffs_, table_, env.g, spectrum);
  return fine_from_spectrum(*grid_, spectrum);
}

EnvelopeField decompose(const Eigen::VectorXcd& psi, const BandBasis& bb, const GridPtr& grid, int n_bands) {
  return BandTransform(bb, grid, n_bands).decompose(psi);
}

Eigen::VectorXcd reconstruct(const EnvelopeField& env, const BandBasis& bb) {
  return BandTransform(bb, env.grid, env.n_bands()).reconstruct(env);
}

Eigen::MatrixXcd envelope_on_macro(const EnvelopeField& env) {
  const MacroGrid& grid = *env.grid;
  const int nb = env.n_bands();
  Eigen::MatrixXcd out(nb, grid.n_k);
  Eigen::VectorXcd buf(grid.n_k), res(grid.n_k);
  const double scale = fourier_norm(grid.dim) * grid.dk;
  for (int n = 0; n < nb; ++n) {
    for (long r = 0; r < grid.n_k; ++r) buf[grid.macro_pos[r]] = env.g(n, r);
    grid.macro_fft->inverse(buf.data(), res.data());
    out.row(n) = scale * res.transpose();
  }
  return out;
}

EnvelopeField envelope_from_macro(const GridPtr& grid, const Eigen::MatrixXcd& f) {
  if (f.cols() != grid->n_k) raise(ErrorKind::GridMismatch, "macro samples do not match grid");
  EnvelopeField env = zero_field(grid, static_cast<int>(f.rows()));
  Eigen::VectorXcd buf(grid->n_k), res(grid->n_k);
  const double scale = fourier_norm(grid->dim) * std::pow(grid->eps, grid->dim) * grid->geom.cell_volume;
  for (Eigen::Index n = 0; n < f.rows(); ++n) {
    buf = f.row(n).transpose();
    grid->macro_fft->forward(buf.data(), res.data());
    for (long r = 0; r < grid->n_k; ++r) env.g(n, r) = scale * res[grid->macro_pos[r]];
  }
  return env;
}

Eigen::MatrixXcd envelope_on_fine(const EnvelopeField& env) {
  const MacroGrid& grid = *env.grid;
  Eigen::MatrixXcd out(env.n_bands(), grid.n_fine);
  Eigen::VectorXcd buf(grid.n_fine), res(grid.n_fine);
  const double scale = fourier_norm(grid.dim) * grid.dk;
  for (int n = 0; n < env.n_bands(); ++n) {
    buf.setZero();
    for (long r = 0; r < grid.n_k; ++r) buf[grid.fine_pos[r]] = env.g(n, r);
    grid.fine_fft->inverse(buf.data(), res.data());
    out.row(n) = scale * res.transpose();
  }
  return out;
}

double l2_norm(const EnvelopeField& env) { return std::sqrt(env.g.squaredNorm() * env.grid->dk); }

double fine_norm(const MacroGrid& grid, const Eigen::VectorXcd& psi) {
  require_fine(grid, psi);
  return std::sqrt(psi.squaredNorm() * grid.dv);
}

double sobolev_norm(const EnvelopeField& env, double mu) {
  const MacroGrid& grid = *env.grid;
  double sum = 0.0;
  for (long r = 0; r < grid.n_k; ++r)
    sum += std::pow(1.0 + grid.k_points[r].squaredNorm(), mu) * env.g.col(r).squaredNorm();
  return std::sqrt(sum * grid.dk);
}

double fine_sobolev_norm(const MacroGrid& grid, const Eigen::VectorXcd& psi, double mu) {
  const Eigen::VectorXcd spectrum = fine_spectrum(grid, psi);
  double sum = 0.0;
  for (long p = 0; p < grid.n_fine; ++p)
    sum += std::pow(1.0 + grid.fine_wavevector(p).squaredNorm(), mu) * std::norm(spectrum[p]);
  return std::sqrt(sum * grid.dk);
}

std::complex<double> inner(const EnvelopeField& a, const EnvelopeField& b) {
  require_same(*a.grid, *b.grid);
  if (a.g.rows() != b.g.rows()) raise(ErrorKind::GridMismatch, "band counts differ");
  return (a.g.conjugate().cwiseProduct(b.g)).sum() * a.grid->dk;
}

std::complex<double> fine_inner(const MacroGrid& grid, const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  require_fine(grid, a);
  require_fine(grid, b);
  return a.dot(b) * grid.dv;
}

EnvelopeField truncate(const EnvelopeField& env, double gamma) {
  EnvelopeField out = env;
  for (long r = 0; r < env.grid->n_k; ++r)
    if (!in_zone(env.grid->geom, env.grid->k_points[r], gamma)) out.g.col(r).setZero();
  return out;
}

Eigen::VectorXcd truncate_spectrum(const MacroGrid& grid, const Eigen::VectorXcd& spectrum, double gamma) {
  if (spectrum.size() != grid.n_k) raise(ErrorKind::GridMismatch, "spectrum does not match the k-grid");
  Eigen::VectorXcd out = spectrum;
  for (long r = 0; r < grid.n_k; ++r)
    if (!in_zone(grid.geom, grid.k_points[r], gamma)) out[r] = 0.0;
  return out;
}

double truncation_constant(const LatticeGeometry& geom, double mu) { return std::pow(geom.inscribed_radius, -mu); }

Eigen::VectorXcd sample_fine(const ExternalPotentialSpec& v, const MacroGrid& grid) {
  if (v.dim != grid.dim) raise(ErrorKind::GridMismatch, "series dimension differs from grid");
  if (v.box_cells != grid.box_cells) raise(ErrorKind::GridMismatch, "series box_cells differs from grid");
  const int side = grid.m * grid.q;
  std::vector<std::complex<double>> roots(side);
  for (int t = 0; t < side; ++t) roots[t] = std::polar(1.0, kTwoPi * t / side);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.n_fine);
  for (const auto& term : v.terms) {
    // Frequency j + m z in fine index units; the phase at s is 2 pi (j + m z).s / (m q).
    IntVec freq(grid.dim);
    for (int i = 0; i < grid.dim; ++i) freq[i] = wrap(term.macro[i] + static_cast<long>(grid.m) * term.cell[i], side);
    IntVec s(grid.dim, 0);
    for (long p = 0; p < grid.n_fine; ++p) {
      long t = 0;
      for (int i = 0; i < grid.dim; ++i) t += static_cast<long>(freq[i]) * s[i];
      out[p] += term.c * roots[t % side];
      for (int i = grid.dim - 1; i >= 0; --i) {
        if (++s[i] < side) break;
        s[i] = 0;
      }
    }
  }
  return out;
}

Eigen::VectorXcd sample_macro(const TestFunction& theta, const MacroGrid& grid) {
  if (theta.dim != grid.dim) raise(ErrorKind::GridMismatch, "series dimension differs from grid");
  if (theta.box_cells != grid.box_cells) raise(ErrorKind::GridMismatch, "series box_cells differs from grid");
  if (theta.depends_on_cell()) raise(ErrorKind::InvalidArgument, "macro sampling needs a cell-independent series");
  const int side = grid.m;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(grid.n_k);
  for (const auto& term : theta.terms) {
    for (long p = 0; p < grid.n_k; ++p) {
      const IntVec s = unflatten(p, grid.dim, side);
      long t = 0;
      for (int i = 0; i < grid.dim; ++i) t += static_cast<long>(wrap(term.macro[i], side)) * s[i];
      out[p] += term.c * std::polar(1.0, kTwoPi * static_cast<double>(t % side) / side);
    }
  }
  return out;
}

double weighted_mass(const MacroGrid& grid, const Eigen::VectorXcd& psi, const TestFunction& theta) {
  require_fine(grid, psi);
  const Eigen::VectorXcd th = sample_fine(theta, grid);
  return (th.real().array() * psi.array().abs2()).sum() * grid.dv;
}

double weighted_band_mass(const EnvelopeField& env, const TestFunction& theta) {
  const MacroGrid& grid = *env.grid;
  const Eigen::VectorXcd th = sample_fine(theta, grid);
  const Eigen::MatrixXcd f = envelope_on_fine(env);
  const Eigen::VectorXd density = f.cwiseAbs2().colwise().sum().transpose();
  return (th.real().array() * density.array()).sum() * grid.dv;
}

double weighted_density_gap(const Eigen::VectorXcd& psi, const EnvelopeField& env, const TestFunction& theta) {
  return weighted_mass(*env.grid, psi, theta) - weighted_band_mass(env, theta);
}

EnvelopeField embed(const EnvelopeField& env, const GridPtr& target) {
  const MacroGrid& src = *env.grid;
  if (src.dim != target->dim || src.box_cells != target->box_cells ||
      !src.geom.direct_matrix.isApprox(target->geom.direct_matrix, 1e-14))
    raise(ErrorKind::GridMismatch, "embedding requires the same lattice and torus");
  if (target->m < src.m) raise(ErrorKind::GridMismatch, "embedding target must be at least as fine");
  EnvelopeField out = zero_field(target, env.n_bands());
  out.time = env.time;
  const int lo = target->m / 2;
  for (long r = 0; r < src.n_k; ++r) {
    IntVec shifted = src.k_index[r];
    for (int& v : shifted) {
      v += lo;
      if (v < 0 || v >= target->m) raise(ErrorKind::GridMismatch, "source k-grid does not nest in the target");
    }
    out.g.col(flatten(shifted, target->m)) = env.g.col(r);
  }
  return out;
}

}  // namespace envkp
