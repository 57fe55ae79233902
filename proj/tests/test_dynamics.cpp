#include "envkp/checks.hpp"
#include "envkp/dynamics.hpp"
#include "envkp/error.hpp"
#include "envkp/harness.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
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

struct Fixture {
  BandBasis bb = solve_cell(oracle::mathieu(), 16, 6);
  std::vector<Eigen::MatrixXd> masses = effective_masses(bb);
  ExternalPotentialSpec v = oracle::two_scale_potential();
  BandProjectedPotential bpp = band_project(v, bb);
  BandProjectedPotential none = band_project(ExternalPotentialSpec::zero(1, 4), bb);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

double distance(const EnvelopeField& a, const EnvelopeField& b) {
  return std::sqrt((a.g - b.g).squaredNorm() * a.grid->dk);
}

PropagatorConfig config(double dt, double t_final, int record_every = 1) {
  PropagatorConfig pc;
  pc.dt = dt;
  pc.t_final = t_final;
  pc.record_every = record_every;
  return pc;
}

}  // namespace

TEST_CASE("free k.p flow equals the matrix exponential of the k.p Hamiltonian") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  std::mt19937_64 rng(1);
  const EnvelopeField g0 = random_envelope(grid, 6, rng);
  const double t = 0.05;
  const Trajectory traj = evolve_kp(g0, f.bb, f.none, config(0.005, t, 10));
  const double e2 = grid->eps * grid->eps;
  for (long r = 0; r < grid->n_k; ++r) {
    const Eigen::VectorXd xi = grid->eps * grid->k_points[r];
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(6, 6);
    for (int n = 0; n < 6; ++n) a(n, n) = f.bb.energies[n] + 0.5 * xi.squaredNorm();
    a += -cdouble(0.0, 1.0) * xi[0] * f.bb.momentum[0];
    const Eigen::MatrixXcd prop = (-cdouble(0.0, t / e2) * a).exp();
    CHECK((traj.frames.back().g.col(r) - prop * g0.g.col(r)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("free effective-mass and limit flows are closed-form phases") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.125, 4, 36);
  std::mt19937_64 rng(2);
  const EnvelopeField g0 = random_envelope(grid, 6, rng);
  const double t = 0.2;
  const EnvelopeField em = evolve_em(g0, f.bb, f.masses, f.none, config(0.01, t, 20)).frames.back();
  const ExternalPotentialSpec c = ExternalPotentialSpec::constant(1, 4, 0.3);
  const EnvelopeField lim = evolve_limit(g0, f.masses, band_project(c, f.bb), config(0.01, t, 20)).frames.back();
  const double e2 = grid->eps * grid->eps;
  for (long r = 0; r < grid->n_k; ++r) {
    const double k = grid->k_points[r][0];
    for (int n = 0; n < 6; ++n) {
      const double m = f.masses[n](0, 0);
      const cdouble want_em = std::polar(1.0, -t * (f.bb.energies[n] / e2 + 0.5 * m * k * k)) * g0.g(n, r);
      const cdouble want_lim = std::polar(1.0, -t * (0.3 + 0.5 * m * k * k)) * g0.g(n, r);
      CHECK(std::abs(em.g(n, r) - want_em) < 1e-11);
      CHECK(std::abs(lim.g(n, r) - want_lim) < 1e-11);
    }
  }
}

TEST_CASE("free flows stay in the initial band") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.125, 4, 36);
  InitialDatum init;
  const EnvelopeField g0 = initial_envelope(init, grid, 6);
  const EnvelopeField em = evolve_em(g0, f.bb, f.masses, f.none, config(0.01, 0.1, 10)).frames.back();
  const EnvelopeField lim = evolve_limit(g0, f.masses, f.none, config(0.01, 0.1, 10)).frames.back();
  CHECK(em.g.bottomRows(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lim.g.bottomRows(5).cwiseAbs().maxCoeff() == 0.0);
  CHECK(em.g.row(0).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("all propagators conserve the norm and run backwards") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  std::mt19937_64 rng(3);
  const EnvelopeField g0 = random_envelope(grid, 6, rng);
  const double dt = 0.005;
  PropagatorConfig fwd = config(dt, 0.1);
  PropagatorConfig bwd = config(-dt, 0.0);
  bwd.t_start = 0.1;
  const std::vector<std::function<Trajectory(const EnvelopeField&, const PropagatorConfig&)>> runs = {
      [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_kp(g, f.bb, f.bpp, c, &f.v); },
      [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_kp(g, f.bb, f.bpp, c); },
      [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_em(g, f.bb, f.masses, f.bpp, c); },
      [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_filtered(g, f.bb, f.masses, f.bpp, c); },
      [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_limit(g, f.masses, f.bpp, c); },
  };
  for (const auto& run : runs) {
    const Trajectory a = run(g0, fwd);
    REQUIRE(a.frames.size() == 21);
    const auto norms = a.norms();
    for (std::size_t i = 1; i < norms.size(); ++i) CHECK(std::abs(norms[i] - norms[i - 1]) <= 1e-10);
    const Trajectory b = run(a.frames.back(), bwd);
    CHECK(b.frames.back().time == doctest::Approx(0.0));
    CHECK(b.frames[1].time < b.frames[0].time);
    CHECK(distance(b.frames.back(), g0) <= 1e-8);
  }
}

TEST_CASE("filtered and effective-mass systems differ by the band gauge") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  InitialDatum init;
  init.bands = {0, 1};
  init.amplitudes = {1.0, 0.5};
  const EnvelopeField g0 = initial_envelope(init, grid, 6);
  std::vector<double> gaps;
  for (double dt : {0.00625 / 2, 0.00625 / 4, 0.00625 / 8}) {
    const EnvelopeField em = evolve_em(g0, f.bb, f.masses, f.bpp, config(dt, 0.1, 1 << 20)).frames.back();
    const EnvelopeField h = evolve_filtered(g0, f.bb, f.masses, f.bpp, config(dt, 0.1, 1 << 20)).frames.back();
    gaps.push_back(distance(apply_band_gauge(h, f.bb.energies, 0.1, 1.0), em));
  }
  // The filtered potential step is the exact gauge image of the effective-mass step.
  for (double gap : gaps) CHECK(gap < 1e-12);
}

TEST_CASE("Strang splitting is second order") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  InitialDatum init;
  const EnvelopeField g0 = initial_envelope(init, grid, 6);
  auto end = [&](double dt) { return evolve_kp(g0, f.bb, f.bpp, config(dt, 0.2, 1 << 20)).frames.back(); };
  const EnvelopeField a = end(0.01), b = end(0.005), c = end(0.0025);
  const double ratio = distance(a, b) / distance(b, c);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  const BandTransform t(f.bb, grid);
  const PeriodicPotentialSpec w = oracle::mathieu();
  auto fine_end = [&](double dt) {
    return evolve_schrodinger(t.reconstruct(g0), grid, w, f.v, config(dt, 0.02, 1 << 20)).frames.back();
  };
  const Eigen::VectorXcd s1 = fine_end(2e-4), s2 = fine_end(1e-4), s4 = fine_end(5e-5);
  const double fine_ratio = fine_norm(*grid, s1 - s2) / fine_norm(*grid, s2 - s4);
  CHECK(fine_ratio > 3.5);
  CHECK(fine_ratio < 4.5);
}

TEST_CASE("full-basis envelope system reproduces the Schrodinger flow") {
  const PeriodicPotentialSpec w = oracle::mathieu();
  const int cutoff = 8;
  const BandBasis bb = solve_cell(w, cutoff, 2 * cutoff + 1, 0.0);
  const ExternalPotentialSpec v = oracle::two_scale_potential();
  const GridPtr grid = make_grid(bb.geom, 0.25, 4, 20);
  InitialDatum init;
  init.bands = {0, 1};
  init.amplitudes = {1.0, 0.5};
  const EnvelopeField g0 = initial_envelope(init, grid, bb.n_bands);
  const BandTransform t(bb, grid);
  const BandProjectedPotential bpp = band_project(v, bb);
  auto envelope = [&](double dt) { return evolve_kp(g0, bb, bpp, config(dt, 0.1, 1 << 20), &v).frames.back(); };
  auto fine = [&](double dt) {
    return t.decompose(evolve_schrodinger(t.reconstruct(g0), grid, w, v, config(dt, 0.1, 1 << 20)).frames.back());
  };
  const EnvelopeField e1 = envelope(1e-3), e2 = envelope(5e-4);
  const EnvelopeField s1 = fine(1e-3), s2 = fine(5e-4);
  const double self = distance(e1, e2) + distance(s1, s2);
  CHECK(distance(e1, s1) <= 5.0 * self);
  CHECK(distance(e1, s1) < 1e-4);
}

TEST_CASE("free-flow gap against the two-band closed form") {
  const LatticeGeometry g = build_lattice(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::numbers::pi));
  const double e1 = 1.0, e2 = 1.6, p = 0.25;
  Eigen::VectorXd energies(2);
  energies << e1, e2;
  Eigen::MatrixXcd mom(2, 2);
  mom << 0.0, p, -p, 0.0;
  const BandBasis bb = BandBasis::synthetic(g, energies, {mom});
  const auto masses = effective_masses(bb);
  const GridPtr grid = make_grid(g, 0.125, 4, 36);
  std::mt19937_64 rng(4);
  const EnvelopeField g0 = random_envelope(grid, 2, rng);
  const double t = 0.3, eps2 = grid->eps * grid->eps;
  double sum = 0.0;
  for (long r = 0; r < grid->n_k; ++r) {
    const double xi = grid->eps * grid->k_points[r][0];
    const double mid = 0.5 * (e1 + e2) + 0.5 * xi * xi;
    const double split = std::sqrt(0.25 * (e2 - e1) * (e2 - e1) + xi * xi * p * p);
    const double lam[2] = {mid - split, mid + split};
    for (int n = 0; n < 2; ++n) {
      const double lam2 = energies[n] + 0.5 * masses[n](0, 0) * xi * xi;
      sum += std::norm(std::polar(1.0, -t * lam[n] / eps2) - std::polar(1.0, -t * lam2 / eps2)) * std::norm(g0.g(n, r));
    }
  }
  CHECK(free_flow_gap(g0, bb, masses, t) == doctest::Approx(std::sqrt(sum * grid->dk)).epsilon(1e-10));
  CHECK(free_flow_gap(g0, bb, masses, 0.0) == 0.0);
}

TEST_CASE("step policy and input errors") {
  const auto& f = fixture();
  CHECK(step_count(config(0.01, 0.1)) == 10);
  CHECK(kind_of([] { step_count(config(0.03, 0.1)); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { step_count(config(0.0, 0.1)); }) == ErrorKind::InvalidArgument);
  const double dt = fit_step(0.125, 0.01);
  CHECK(dt <= 0.01);
  CHECK(0.125 / dt == doctest::Approx(std::round(0.125 / dt)));
  CHECK(dt == doctest::Approx(0.125 / 13.0));

  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  const EnvelopeField g0 = zero_field(grid, 6);
  CHECK(kind_of([&] { evolve_filtered(g0, f.bb, f.masses, f.bpp, config(0.01, 0.1)); }) == ErrorKind::StepTooLarge);
  const Trajectory a = evolve_limit(g0, f.masses, f.bpp, config(0.005, 0.1, 5));
  const Trajectory b = evolve_limit(g0, f.masses, f.bpp, config(0.005, 0.1, 4));
  CHECK(kind_of([&] { model_gap(a, b); }) == ErrorKind::GridMismatch);
  CHECK(kind_of([&] { evolve_em(zero_field(grid, 3), f.bb, f.masses, f.bpp, config(0.01, 0.1)); }) ==
        ErrorKind::GridMismatch);
}

TEST_CASE("recorded times are multiples of record_every steps") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  const Trajectory a = evolve_em(zero_field(grid, 6), f.bb, f.masses, f.bpp, config(0.005, 0.1, 4));
  REQUIRE(a.frames.size() == 6);
  for (std::size_t i = 0; i < a.frames.size(); ++i) CHECK(a.frames[i].time == doctest::Approx(0.02 * i));
}

TEST_CASE("density observable of the constant test function is the mass") {
  const auto& f = fixture();
  const GridPtr grid = make_grid(f.bb.geom, 0.25, 4, 36);
  std::mt19937_64 rng(5);
  const EnvelopeField g = random_envelope(grid, 6, rng);
  const TestFunction one = TestFunction::constant(1, 4, 1.0);
  CHECK(density_observable(g, one) == doctest::Approx(1.0));
  CHECK(density_observable(*grid, reconstruct(g, f.bb), one) == doctest::Approx(1.0));
}
