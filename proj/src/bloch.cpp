#include "envkp/bloch.hpp"

#include "envkp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace envkp {

namespace {

constexpr double kPi = std::numbers::pi;

bool same_index(const IntVec& a, const IntVec& b) { return a == b; }

IntVec negate(IntVec z) {
  for (int& c : z) c = -c;
  return z;
}

// Unit directions used by the radial scan.
std::vector<Eigen::VectorXd> scan_directions(int dim, int count) {
  std::vector<Eigen::VectorXd> dirs;
  if (dim == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int a = 0; a < count; ++a) {
      const double phi = 2.0 * kPi * a / count;
      Eigen::VectorXd v(2);
      v << std::cos(phi), std::sin(phi);
      dirs.push_back(v);
    }
  } else {
    for (int i = 0; i < dim; ++i) {
      for (double s : {1.0, -1.0}) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        v[i] = s;
        dirs.push_back(v);
      }
    }
    for (const auto& signs : integer_box(dim, 0, 2)) {
      Eigen::VectorXd v(dim);
      for (int i = 0; i < dim; ++i) v[i] = signs[i] ? -1.0 : 1.0;
      dirs.push_back(v / std::sqrt(static_cast<double>(dim)));
    }
  }
  return dirs;
}

}  // namespace

cdouble PeriodicPotentialSpec::coefficient(const IntVec& z) const {
  cdouble sum = 0.0;
  for (const auto& [idx, c] : coefficients)
    if (same_index(idx, z)) sum += c;
  return sum;
}

double PeriodicPotentialSpec::value(const Eigen::VectorXd& z) const {
  cdouble sum = 0.0;
  for (const auto& [idx, c] : coefficients) {
    const double phase = geom.reciprocal_vector(idx).dot(z);
    sum += c * std::polar(1.0, phase);
  }
  return sum.real();
}

int PeriodicPotentialSpec::max_harmonic() const {
  int h = 0;
  for (const auto& [idx, c] : coefficients) {
    if (std::abs(c) == 0.0) continue;
    for (int v : idx) h = std::max(h, std::abs(v));
  }
  return h;
}

PeriodicPotentialSpec PeriodicPotentialSpec::constant(const LatticeGeometry& geom, double c) {
  PeriodicPotentialSpec w;
  w.geom = geom;
  w.coefficients.push_back({IntVec(geom.dim, 0), cdouble(c, 0.0)});
  return w;
}

void validate_periodic(const PeriodicPotentialSpec& w, bool require_lower_bound) {
  for (const auto& [idx, c] : w.coefficients) {
    if (static_cast<int>(idx.size()) != w.geom.dim)
      raise(ErrorKind::ConfigInvalid, "periodic harmonic has wrong dimension");
    const cdouble partner = w.coefficient(negate(idx));
    if (std::abs(partner - std::conj(w.coefficient(idx))) > 1e-12)
      raise(ErrorKind::ConfigInvalid, "periodic potential is not real (W_{-z} != conj W_z)");
  }
  if (!require_lower_bound) return;
  const int side = w.geom.dim == 1 ? 1024 : (w.geom.dim == 2 ? 96 : 24);
  for (const auto& s : integer_box(w.geom.dim, 0, side)) {
    Eigen::VectorXd frac(w.geom.dim);
    for (int i = 0; i < w.geom.dim; ++i) frac[i] = static_cast<double>(s[i]) / side;
    const double val = w.value(w.geom.direct_matrix * frac);
    if (val < 1.0 - 1e-12) {
      std::ostringstream os;
      os << "periodic potential drops below 1 (min sample " << val << ")";
      raise(ErrorKind::ConfigInvalid, os.str());
    }
  }
}

BandBasis BandBasis::synthetic(const LatticeGeometry& geom, const Eigen::VectorXd& energies,
                               const std::vector<Eigen::MatrixXcd>& momentum) {
  if (static_cast<int>(momentum.size()) != geom.dim)
    raise(ErrorKind::InvalidArgument, "momentum needs one matrix per dimension");
  BandBasis bb;
  bb.geom = geom;
  bb.n_bands = static_cast<int>(energies.size());
  bb.energies = energies;
  bb.coeffs = Eigen::MatrixXcd::Zero(bb.n_bands, 0);
  bb.momentum = momentum;
  for (const auto& p : momentum)
    if (p.rows() != bb.n_bands || p.cols() != bb.n_bands)
      raise(ErrorKind::InvalidArgument, "momentum matrix has wrong shape");
  return bb;
}

BandBasis leading_bands(const BandBasis& bb, int n) {
  if (n < 1 || n > bb.n_bands) raise(ErrorKind::BasisTooSmall, "cannot keep more bands than solved");
  if (n == bb.n_bands) return bb;
  BandBasis out = bb;
  out.n_bands = n;
  out.energies = bb.energies.head(n);
  out.coeffs = bb.coeffs.topRows(n);
  for (auto& p : out.momentum) p = p.topLeftCorner(n, n).eval();
  return out;
}

void fix_phase_largest(Eigen::Ref<Eigen::VectorXcd> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  Eigen::Index pick = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= vmax * (1.0 - 1e-8)) {
      pick = i;
      break;
    }
  }
  v *= std::conj(v[pick]) / std::abs(v[pick]);
}

Eigen::MatrixXcd planewave_hamiltonian(const PeriodicPotentialSpec& w, const ReciprocalIndexSet& basis,
                                       const Eigen::VectorXd& k) {
  const int q = basis.size();
  const int dim = w.geom.dim;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
  for (const auto& [idx, c] : w.coefficients) {
    for (int a = 0; a < q; ++a) {
      IntVec target = basis.indices[a];
      for (int i = 0; i < dim; ++i) target[i] -= idx[i];
      const int b = basis.find(target);
      if (b >= 0) h(a, b) += c;
    }
  }
  for (int a = 0; a < q; ++a) h(a, a) += 0.5 * (basis.points[a] + k).squaredNorm();
  return h;
}

BandBasis solve_cell(const PeriodicPotentialSpec& w, int cutoff, int n_bands, double gap_tol) {
  const ReciprocalIndexSet basis = reciprocal_points(w.geom, cutoff);
  const int q = basis.size();
  if (n_bands < 1 || n_bands > q) {
    std::ostringstream os;
    os << "requested " << n_bands << " bands from a basis of " << q << " planewaves";
    raise(ErrorKind::BasisTooSmall, os.str());
  }
  const Eigen::MatrixXcd h = planewave_hamiltonian(w, basis, Eigen::VectorXd::Zero(w.geom.dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) raise(ErrorKind::InvalidArgument, "cell eigensolver failed");

  BandBasis bb;
  bb.geom = w.geom;
  bb.basis = basis;
  bb.n_bands = n_bands;
  bb.gap_tol = gap_tol;
  bb.energies = es.eigenvalues().head(n_bands);
  if (gap_tol > 0.0) {
    for (int n = 0; n + 1 < n_bands; ++n) {
      if (bb.energies[n + 1] - bb.energies[n] <= gap_tol) {
        std::ostringstream os;
        os << "bands " << n + 1 << " and " << n + 2 << " are closer than gap_tol=" << gap_tol;
        raise(ErrorKind::DegenerateSpectrum, os.str());
      }
    }
  }
  bb.coeffs.resize(n_bands, q);
  for (int n = 0; n < n_bands; ++n) {
    Eigen::VectorXcd v = es.eigenvectors().col(n);
    fix_phase_largest(v);
    bb.coeffs.row(n) = v.transpose();
  }
  bb.momentum.assign(w.geom.dim, Eigen::MatrixXcd::Zero(n_bands, n_bands));
  for (int i = 0; i < w.geom.dim; ++i) {
    Eigen::VectorXcd ilam(q);
    for (int a = 0; a < q; ++a) ilam[a] = cdouble(0.0, basis.points[a][i]);
    bb.momentum[i] = bb.coeffs.conjugate() * ilam.asDiagonal() * bb.coeffs.transpose();
  }
  return bb;
}

Eigen::VectorXd direct_fiber_solve(const PeriodicPotentialSpec& w, int cutoff, const Eigen::VectorXd& k,
                                   int n_bands) {
  const ReciprocalIndexSet basis = reciprocal_points(w.geom, cutoff);
  if (n_bands < 1 || n_bands > basis.size())
    raise(ErrorKind::BasisTooSmall, "n_bands exceeds planewave basis");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(planewave_hamiltonian(w, basis, k),
                                                     Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(n_bands);
}

Eigen::MatrixXcd fiber_matrix(const BandBasis& bb, const Eigen::VectorXd& xi) {
  const int n = bb.n_bands;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < bb.dim(); ++i) a -= cdouble(0.0, xi[i]) * bb.momentum[i];
  const double kinetic = 0.5 * xi.squaredNorm();
  for (int b = 0; b < n; ++b) a(b, b) += bb.energies[b] + kinetic;
  // Exact Hermitian symmetrization removes round-off in the momentum products.
  return 0.5 * (a + a.adjoint());
}

FiberSpectrum diagonalize_fiber(const BandBasis& bb, const Eigen::VectorXd& xi,
                                const FiberSpectrum* reference) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fiber_matrix(bb, xi));
  FiberSpectrum fs;
  fs.xi = xi;
  fs.lambdas = es.eigenvalues();
  fs.diagonalizer = es.eigenvectors();
  for (int c = 0; c < bb.n_bands; ++c) {
    if (reference != nullptr) {
      const cdouble overlap = reference->diagonalizer.col(c).dot(fs.diagonalizer.col(c));
      if (std::abs(overlap) > 0.0) fs.diagonalizer.col(c) *= std::conj(overlap) / std::abs(overlap);
    } else {
      fix_phase_largest(fs.diagonalizer.col(c));
    }
  }
  return fs;
}

EffectiveMass effective_mass(const BandBasis& bb, int n, int n_terms) {
  if (n < 0 || n >= bb.n_bands) raise(ErrorKind::InvalidArgument, "band index out of range");
  if (n_terms < 0 || n_terms > bb.n_bands) n_terms = bb.n_bands;
  const int d = bb.dim();
  EffectiveMass out;
  out.inverse_mass = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
  for (int np = 0; np < bb.n_bands; ++np) {
    if (np == n) continue;
    Eigen::MatrixXcd term(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) term(i, j) = bb.momentum[i](n, np) * bb.momentum[j](np, n);
    term = (term + term.transpose()).eval() / (bb.energies[n] - bb.energies[np]);
    if (np < n_terms) {
      sum += term;
    } else {
      out.truncation_residual = std::max(out.truncation_residual, term.norm());
    }
  }
  out.imag_residual = sum.imag().cwiseAbs().maxCoeff();
  out.inverse_mass -= sum.real();
  return out;
}

std::vector<Eigen::MatrixXd> effective_masses(const BandBasis& bb) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(bb.n_bands);
  for (int n = 0; n < bb.n_bands; ++n) out.push_back(effective_mass(bb, n).inverse_mass);
  return out;
}

FdMass effective_mass_fd(const BandBasis& bb, int n, double h) {
  if (n < 0 || n >= bb.n_bands) raise(ErrorKind::InvalidArgument, "band index out of range");
  if (!(h > 0.0)) raise(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  const int d = bb.dim();
  const FiberSpectrum origin = diagonalize_fiber(bb, Eigen::VectorXd::Zero(d));

  auto lambda_at = [&](const Eigen::VectorXd& xi) {
    const FiberSpectrum fs = diagonalize_fiber(bb, xi, &origin);
    Eigen::Index best = 0;
    (origin.diagonalizer.col(n).adjoint() * fs.diagonalizer).cwiseAbs().maxCoeff(&best);
    if (best != n) {
      std::ostringstream os;
      os << "band " << n + 1 << " changes order within the stencil at |xi|=" << xi.norm();
      raise(ErrorKind::StepTooLarge, os.str());
    }
    return fs.lambdas[n];
  };

  FdMass out;
  out.hessian = Eigen::MatrixXd::Zero(d, d);
  out.gradient = Eigen::VectorXd::Zero(d);
  const double center = lambda_at(Eigen::VectorXd::Zero(d));
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd ei = Eigen::VectorXd::Unit(d, i) * h;
    const double fp = lambda_at(ei);
    const double fm = lambda_at(-ei);
    out.gradient[i] = (fp - fm) / (2.0 * h);
    out.hessian(i, i) = (fp - 2.0 * center + fm) / (h * h);
    for (int j = 0; j < i; ++j) {
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(d, j) * h;
      const double v = (lambda_at(ei + ej) - lambda_at(ei - ej) - lambda_at(-ei + ej) + lambda_at(-ei - ej)) /
                       (4.0 * h * h);
      out.hessian(i, j) = v;
      out.hessian(j, i) = v;
    }
  }
  return out;
}

double noncrossing_radius(const BandBasis& bb, int n_check, const RadiusScan& scan) {
  if (n_check < 1 || n_check > bb.n_bands) raise(ErrorKind::InvalidArgument, "N out of range");
  if (n_check == 1) return scan.r_max;
  const auto dirs = scan_directions(bb.dim(), scan.n_directions);
  double good = 0.0;
  for (int s = 1; s <= scan.n_radial; ++s) {
    const double r = scan.r_max * s / scan.n_radial;
    for (const auto& u : dirs) {
      const Eigen::VectorXd lam = diagonalize_fiber(bb, u * r).lambdas;
      for (int n = 0; n + 1 < n_check; ++n)
        if (lam[n + 1] - lam[n] <= bb.gap_tol) return good;
    }
    good = r;
  }
  return good;
}

BandGrowthReport band_growth_margin(const BandBasis& bb, const Eigen::VectorXd& xi, double tol) {
  const FiberSpectrum fs = diagonalize_fiber(bb, xi);
  const double x = xi.norm();
  BandGrowthReport rep;
  rep.xi = xi;
  rep.n0 = bb.n_bands;
  for (int n = 0; n < bb.n_bands; ++n) {
    if (bb.energies[n] >= 0.5 * x * x) {
      rep.n0 = n;
      break;
    }
  }
  rep.growth_margin = std::numeric_limits<double>::infinity();
  rep.lower_bound_margin = std::numeric_limits<double>::infinity();
  for (int n = 0; n < bb.n_bands; ++n) {
    const double e = bb.energies[n];
    const double lam = fs.lambdas[n];
    const double scale = 1.0 + std::abs(e) + std::abs(lam);
    if (n >= rep.n0) {
      const double m = x * std::sqrt(2.0 * e) + 0.5 * x * x - std::abs(lam - e);
      if (m < rep.growth_margin) {
        rep.growth_margin = m;
        rep.growth_band = n;
      }
      if (m < -tol * scale) {
        std::ostringstream os;
        os << "growth bound violated at band " << n + 1 << ", |xi|=" << x << ", margin " << m;
        raise(ErrorKind::BoundViolated, os.str());
      }
    }
    const double m1 = e + 2.0 * x * std::sqrt(std::max(e, 0.0)) + 0.5 * x * x - lam;
    if (m1 < rep.lower_bound_margin) {
      rep.lower_bound_margin = m1;
      rep.lower_bound_band = n;
    }
    if (m1 < -tol * scale) {
      std::ostringstream os;
      os << "upper bound violated at band " << n + 1 << ", |xi|=" << x << ", margin " << m1;
      raise(ErrorKind::BoundViolated, os.str());
    }
  }
  return rep;
}

Eigen::VectorXcd vn_one_coefficients(const BandBasis& bb) {
  const int zero = bb.basis.find(IntVec(bb.dim(), 0));
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(bb.n_bands);
  if (zero < 0 || bb.coeffs.cols() == 0) return out;
  out = std::sqrt(bb.geom.cell_volume) * bb.coeffs.col(zero);
  return out;
}

}  // namespace envkp
