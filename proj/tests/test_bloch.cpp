#include "envkp/bloch.hpp"
#include "envkp/error.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace envkp;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an envkp::Error");
  return ErrorKind::Io;
}

double mathieu_w(double z) { return 1.5 + 0.5 * std::cos(z); }

}  // namespace

TEST_CASE("Mathieu energies match finite differences") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 16, 6);
  const oracle::CellModes fd = oracle::fd_cell_modes(mathieu_w, 2.0 * std::numbers::pi, 512, 6);
  for (int n = 0; n < 6; ++n) CHECK(std::abs(bb.energies[n] - fd.values[n]) < 1e-6 * fd.values[n]);
}

TEST_CASE("cutoff doubling changes the energies by less than 1e-10") {
  const BandBasis a = solve_cell(oracle::mathieu(), 16, 6);
  const BandBasis b = solve_cell(oracle::mathieu(), 32, 6);
  CHECK((a.energies - b.energies).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cell states are orthonormal and the momentum matrix is anti-Hermitian") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 16, 6);
  const Eigen::MatrixXcd gram = bb.coeffs * bb.coeffs.adjoint();
  CHECK((gram - Eigen::MatrixXcd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((bb.momentum[0] + bb.momentum[0].adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("k.p eigenvalues equal the direct fiber eigenvalues in the full basis") {
  const auto w = oracle::mathieu();
  const int cutoff = 8;
  const int q = 2 * cutoff + 1;
  const BandBasis bb = solve_cell(w, cutoff, q, 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd xi(1);
    xi[0] = u(rng);
    const Eigen::VectorXd kp = diagonalize_fiber(bb, xi).lambdas;
    const Eigen::VectorXd direct = direct_fiber_solve(w, cutoff, xi, q);
    for (int n = 0; n < q; ++n) CHECK(std::abs(kp[n] - direct[n]) < 1e-8 * std::abs(direct[n]));
  }
}

TEST_CASE("full-basis equivalence in two dimensions") {
  PeriodicPotentialSpec w;
  Eigen::Matrix2d l;
  l << 2.0 * std::numbers::pi, 0.8, 0.0, 2.0 * std::numbers::pi;
  w.geom = build_lattice(l);
  w.coefficients = {{{0, 0}, 2.0}, {{1, 0}, 0.2}, {{-1, 0}, 0.2}, {{0, 1}, cdouble(0.1, 0.05)},
                    {{0, -1}, cdouble(0.1, -0.05)}};
  const int cutoff = 3;
  const BandBasis bb = solve_cell(w, cutoff, 49, 0.0);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector2d t(u(rng), u(rng));
    const Eigen::VectorXd xi = w.geom.reciprocal_matrix * t;
    const Eigen::VectorXd kp = diagonalize_fiber(bb, xi).lambdas;
    const Eigen::VectorXd direct = direct_fiber_solve(w, cutoff, xi, 49);
    CHECK((kp - direct).cwiseAbs().maxCoeff() < 1e-8 * direct.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("effective masses match finite differences of the fiber energies") {
  const auto w = oracle::mathieu();
  const BandBasis bb = solve_cell(w, 16, 6);
  const double h = 1e-3;
  for (int n = 0; n < 3; ++n) {
    Eigen::VectorXd xp(1), xm(1), x0 = Eigen::VectorXd::Zero(1);
    xp[0] = h;
    xm[0] = -h;
    const double lp = direct_fiber_solve(w, 16, xp, 6)[n];
    const double lm = direct_fiber_solve(w, 16, xm, 6)[n];
    const double l0 = direct_fiber_solve(w, 16, x0, 6)[n];
    const double hessian = (lp - 2.0 * l0 + lm) / (h * h);
    const double gradient = (lp - lm) / (2.0 * h);
    const double inv_mass = effective_mass(bb, n).inverse_mass(0, 0);
    CHECK(std::abs(inv_mass - hessian) < 1e-4 * std::abs(hessian));
    CHECK(std::abs(gradient) < 1e-6);
    const FdMass fd = effective_mass_fd(bb, n, h);
    CHECK(std::abs(fd.hessian(0, 0) - hessian) < 1e-4 * std::abs(hessian));
    CHECK(std::abs(fd.gradient[0]) < 1e-6);
  }
}

TEST_CASE("two-band closed form") {
  const LatticeGeometry g = build_lattice(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::numbers::pi));
  const double e1 = 1.0, e2 = 1.7, p = 0.3;
  Eigen::VectorXd energies(2);
  energies << e1, e2;
  Eigen::MatrixXcd mom(2, 2);
  mom << 0.0, p, -p, 0.0;
  const BandBasis bb = BandBasis::synthetic(g, energies, {mom});
  const double gap = e2 - e1;
  CHECK(std::abs(effective_mass(bb, 0).inverse_mass(0, 0) - (1.0 - 2.0 * p * p / gap)) < 1e-10);
  CHECK(std::abs(effective_mass(bb, 1).inverse_mass(0, 0) - (1.0 + 2.0 * p * p / gap)) < 1e-10);
  for (double x : {0.05, 0.2, -0.4}) {
    Eigen::VectorXd xi(1);
    xi[0] = x;
    const double mid = 0.5 * (e1 + e2) + 0.5 * x * x;
    const double split = std::sqrt(0.25 * gap * gap + x * x * p * p);
    const Eigen::VectorXd lam = diagonalize_fiber(bb, xi).lambdas;
    CHECK(std::abs(lam[0] - (mid - split)) < 1e-12);
    CHECK(std::abs(lam[1] - (mid + split)) < 1e-12);
  }
}

TEST_CASE("constant potential gives the free mass") {
  const LatticeGeometry g1 = build_lattice(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::numbers::pi));
  const BandBasis b1 = solve_cell(PeriodicPotentialSpec::constant(g1, 1.0), 8, 1);
  CHECK(std::abs(b1.energies[0] - 1.0) < 1e-12);
  CHECK(std::abs(effective_mass(b1, 0).inverse_mass(0, 0) - 1.0) < 1e-10);

  Eigen::Matrix2d l;
  l << 2.0, 0.5, 0.0, 3.0;
  const LatticeGeometry g2 = build_lattice(l);
  const BandBasis b2 = solve_cell(PeriodicPotentialSpec::constant(g2, 1.0), 4, 1);
  CHECK((effective_mass(b2, 0).inverse_mass - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solver errors") {
  const auto w = oracle::mathieu();
  CHECK(kind_of([&] { solve_cell(w, 2, 6); }) == ErrorKind::BasisTooSmall);
  const LatticeGeometry g = w.geom;
  CHECK(kind_of([&] { solve_cell(PeriodicPotentialSpec::constant(g, 1.0), 8, 3); }) == ErrorKind::DegenerateSpectrum);
  PeriodicPotentialSpec bad = w;
  bad.coefficients = {{{0}, 1.5}, {{1}, 0.25}, {{-1}, 0.5}};
  CHECK(kind_of([&] { validate_periodic(bad); }) == ErrorKind::ConfigInvalid);
  const BandBasis bb = solve_cell(w, 16, 6);
  CHECK(kind_of([&] { effective_mass_fd(bb, 0, 0.0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("band growth bounds hold in the full basis") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 12, 25, 0.0);
  for (double r : {0.1, 0.5, 1.0}) {
    for (double s : {-1.0, 1.0}) {
      Eigen::VectorXd xi(1);
      xi[0] = s * r;
      const BandGrowthReport rep = band_growth_margin(bb, xi);
      CHECK(rep.growth_margin >= 0.0);
      CHECK(rep.lower_bound_margin >= 0.0);
    }
  }
}

TEST_CASE("zero-mode overlaps match finite-difference cell states") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 16, 8);
  const oracle::CellModes fd = oracle::fd_cell_modes(mathieu_w, 2.0 * std::numbers::pi, 512, 5);
  const Eigen::VectorXcd vn = vn_one_coefficients(bb);
  for (int n = 0; n < 5; ++n) {
    const double integral = std::abs(fd.h * fd.vectors.col(n).sum());
    CHECK(std::abs(std::abs(vn[n]) - integral) < 1e-6);
  }
  CHECK(std::abs(vn[0]) > 2.0);
  CHECK(std::abs(vn[1]) < 1e-10);
}

TEST_CASE("bloch states evaluate consistently with the planewave sum") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 16, 3);
  // The cell average of v_n is |C|^{-1/2} v_{n,0}.
  cdouble mean = 0.0;
  const int pts = 200;
  for (int i = 0; i < pts; ++i) {
    Eigen::VectorXd z(1);
    z[0] = 2.0 * std::numbers::pi * i / pts;
    mean += oracle::bloch_value(bb, 0, z) / static_cast<double>(pts);
  }
  CHECK(std::abs(mean - bb.coeffs(0, bb.basis.find({0})) / std::sqrt(2.0 * std::numbers::pi)) < 1e-12);
}

TEST_CASE("noncrossing radius is positive and bands stay ordered inside it") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 16, 6);
  const double r = noncrossing_radius(bb, 6);
  CHECK(r > 0.0);
  CHECK(r <= 1.0);
}

TEST_CASE("phase fixing makes the largest entry real positive") {
  Eigen::VectorXcd v(3);
  v << cdouble(0.1, 0.2), cdouble(0.0, -2.0), cdouble(1.0, 0.0);
  fix_phase_largest(v);
  CHECK(std::abs(v[1].imag()) < 1e-15);
  CHECK(v[1].real() == doctest::Approx(2.0));
  CHECK(std::abs(v[0]) == doctest::Approx(std::sqrt(0.05)));
}
