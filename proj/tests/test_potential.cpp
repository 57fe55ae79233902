#include "envkp/checks.hpp"
#include "envkp/error.hpp"
#include "envkp/harness.hpp"
#include "envkp/potential.hpp"

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

const BandBasis& mathieu_bands() {
  static const BandBasis bb = solve_cell(oracle::mathieu(), 16, 6);
  return bb;
}

double distance(const EnvelopeField& a, const EnvelopeField& b) {
  return std::sqrt((a.g - b.g).squaredNorm() * a.grid->dk);
}

}  // namespace

TEST_CASE("band-projected potential matches cell quadrature") {
  const auto& bb = mathieu_bands();
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  const BandProjectedPotential bpp = band_project(v, bb);
  for (double x : {0.0, 0.7, 3.1, 11.0}) {
    Eigen::VectorXd xv(1);
    xv[0] = x;
    const Eigen::MatrixXcd quad = oracle::quadrature_band_matrix(v, bb, xv);
    CHECK((bpp.value(bb.geom, xv) - quad).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("collocation samples the projected potential at macro points") {
  const auto& bb = mathieu_bands();
  const BandProjectedPotential bpp = band_project(oracle::two_scale_potential(), bb);
  const GridPtr grid = make_grid(bb.geom, 0.125, 4, 36);
  const kernels::Blocks blocks = collocate(bpp, *grid);
  REQUIRE(static_cast<long>(blocks.size()) == grid->n_k);
  for (long p : {0L, 5L, 31L}) CHECK((blocks[p] - bpp.value(bb.geom, grid->macro_point(p))).cwiseAbs().maxCoeff() < 1e-12);
  const BandProjectedPotential diag = bpp.diagonal();
  Eigen::VectorXd x(1);
  x[0] = 1.3;
  const Eigen::MatrixXcd d = diag.value(bb.geom, x);
  CHECK(std::abs(d(0, 1)) == 0.0);
  CHECK(std::abs(d(2, 2) - bpp.value(bb.geom, x)(2, 2)) < 1e-14);
}

TEST_CASE("operator norm bound on random inputs") {
  const auto& bb = mathieu_bands();
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  const double vsup = sup_norm(v, bb.geom);
  CHECK(vsup == doctest::Approx(1.0).epsilon(1e-6));
  const GridPtr grid = make_grid(bb.geom, 0.125, 4, 36);
  const BandProjectedPotential bpp = band_project(v, bb);
  const ExactPotential exact(v, bb, grid);
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const EnvelopeField g = random_envelope(grid, 6, rng, 0.5 + 0.02 * trial);
    CHECK(l2_norm(exact.apply(g).field) <= vsup * l2_norm(g) + 1e-12);
    CHECK(l2_norm(apply_U0(g, bpp)) <= vsup * l2_norm(g) + 1e-12);
  }
}

TEST_CASE("exact and homogenized operators coincide under the small-support hypothesis") {
  const auto& bb = mathieu_bands();
  ExternalPotentialSpec v = oracle::two_scale_potential();
  v.terms.push_back({{2}, {1}, 0.05});
  v.terms.push_back({{-2}, {-1}, 0.05});
  std::mt19937_64 rng(12);
  for (double eps : {0.25, 0.0625}) {
    const GridPtr grid = make_grid(bb.geom, eps, 4, 36);
    const ExternalPotentialSpec vs = smooth_potential(v, bb.geom, eps);
    const BandProjectedPotential bs = band_project(vs, bb);
    for (int trial = 0; trial < 10; ++trial) {
      const EnvelopeField g = truncate(random_envelope(grid, 6, rng), 1.0 / (3.0 * eps));
      CHECK(distance(apply_Ueps(g, vs, bb).field, apply_U0(g, bs)) < 1e-10);
    }
  }
  const ExternalPotentialSpec coarse = smooth_potential(v, bb.geom, 0.25);
  CHECK(coarse.terms.size() == 8);
  const ExternalPotentialSpec tight = smooth_potential(v, bb.geom, 0.5);
  CHECK(tight.terms.size() == 6);
}

TEST_CASE("two-scale bound holds and the gap decays at the Sobolev rate") {
  const auto& bb = mathieu_bands();
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  for (double mu : {1.0, 2.0}) {
    InitialDatum init;
    init.mu = mu;
    init.bands = {0, 1};
    init.amplitudes = {1.0, 0.5};
    std::vector<double> eps_list{0.25, 0.125, 0.0625, 0.03125}, gaps;
    for (double eps : eps_list) {
      const GridPtr grid = make_grid(bb.geom, eps, 4, 36);
      const TwoScaleGap gap = two_scale_gap(v, bb, initial_envelope(init, grid, 6), mu);
      CHECK(gap.measured <= gap.bound);
      CHECK(gap.c_mu == doctest::Approx(4.0 * std::pow(6.0, mu)));
      gaps.push_back(gap.measured);
    }
    CHECK(oracle::loglog_slope(eps_list, gaps) >= mu - 0.3);
  }
}

TEST_CASE("W_mu norm and sup norm of a finite sum") {
  const auto& bb = mathieu_bands();
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  CHECK(w_mu_norm(v, bb.geom, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w_mu_norm(v, bb.geom, 2.0) == doctest::Approx(1.5625).epsilon(1e-10));
  CHECK(w_mu_norm(ExternalPotentialSpec::constant(1, 4, -0.4), bb.geom, 3.0) == doctest::Approx(0.4));
  CHECK(sup_norm(ExternalPotentialSpec::constant(1, 4, -0.4), bb.geom) == doctest::Approx(0.4));
}

TEST_CASE("constant potentials act as scalars") {
  const auto w = oracle::mathieu();
  const int cutoff = 4;
  const BandBasis all = solve_cell(w, cutoff, 9, 0.0);
  const GridPtr grid = make_grid(all.geom, 0.25, 4, 12);
  std::mt19937_64 rng(13);
  const EnvelopeField g = random_envelope(grid, 9, rng);
  const ExternalPotentialSpec c = ExternalPotentialSpec::constant(1, 4, 0.7);
  const UepsResult r = apply_Ueps(g, c, all);
  CHECK((r.field.g - 0.7 * g.g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.residual < 1e-6);
  const EnvelopeField u0 = apply_U0(g, band_project(c, all));
  CHECK((u0.g - 0.7 * g.g).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exact potential exponential matches a dense matrix exponential") {
  const BandBasis bb = solve_cell(oracle::mathieu(), 4, 3);
  const GridPtr grid = make_grid(bb.geom, 0.5, 4, 12);
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  const ExactPotential exact(v, bb, grid);
  const long dim = 3 * grid->n_k;
  Eigen::MatrixXcd u(dim, dim);
  for (long c = 0; c < dim; ++c) {
    EnvelopeField e = zero_field(grid, 3);
    e.g(c % 3, c / 3) = 1.0;
    const EnvelopeField col = exact.apply(e).field;
    for (long r = 0; r < dim; ++r) u(r, c) = col.g(r % 3, r / 3);
  }
  CHECK((u - u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (u + u.adjoint()));
  const double tau = 0.8;
  const Eigen::VectorXcd phases = (-cdouble(0.0, tau) * es.eigenvalues().cast<cdouble>()).array().exp();
  const Eigen::MatrixXcd expu = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  std::mt19937_64 rng(14);
  const EnvelopeField g = random_envelope(grid, 3, rng);
  Eigen::VectorXcd flat(dim);
  for (long r = 0; r < dim; ++r) flat[r] = g.g(r % 3, r / 3);
  const Eigen::VectorXcd want = expu * flat;
  const EnvelopeField got = exact.exponential(g, tau);
  double err = 0.0;
  for (long r = 0; r < dim; ++r) err = std::max(err, std::abs(got.g(r % 3, r / 3) - want[r]));
  CHECK(err < 1e-12);
  CHECK(l2_norm(got) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("collocated exponentials are unitary and match the dense exponential") {
  const auto& bb = mathieu_bands();
  const GridPtr grid = make_grid(bb.geom, 0.25, 4, 36);
  const CollocatedPotential cp(band_project(oracle::two_scale_potential(), bb), grid);
  const kernels::Blocks e = cp.exponentials(0.3);
  for (long p : {0L, 7L}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cp.values()[p]);
    const Eigen::VectorXcd ph = (-cdouble(0.0, 0.3) * es.eigenvalues().cast<cdouble>()).array().exp();
    const Eigen::MatrixXcd want = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    CHECK((e[p] - want).cwiseAbs().maxCoeff() < 1e-13);
  }
  CHECK(cp.max_operator_norm() <= 1.0 + 1e-12);
}

TEST_CASE("potential input validation") {
  const auto& bb = mathieu_bands();
  ExternalPotentialSpec v = ExternalPotentialSpec::zero(1, 4);
  v.terms = {{{1}, {0}, 0.25}, {{-1}, {0}, 0.3}};
  CHECK(kind_of([&] { validate_hermitian(v); }) == ErrorKind::ConfigInvalid);
  ExternalPotentialSpec high = ExternalPotentialSpec::zero(1, 4);
  high.terms = {{{0}, {20}, 0.1}, {{0}, {-20}, 0.1}};
  CHECK(kind_of([&] { band_project(high, bb); }) == ErrorKind::AliasedCell);
  const GridPtr grid = make_grid(bb.geom, 0.25, 4, 36);
  CHECK(kind_of([&] { ExactPotential(high, bb, grid); }) == ErrorKind::AliasedCell);
  CHECK(band_project(ExternalPotentialSpec::zero(1, 4), bb).is_zero());
}
