#include "envkp/dynamics.hpp"

#include "envkp/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace envkp {

namespace {

using Potential = std::function<void(EnvelopeField&, double tau, double t)>;
using Free = std::function<void(EnvelopeField&)>;

// Strang splitting with consecutive potential half-steps merged between records.
Trajectory strang(const EnvelopeField& env0, const PropagatorConfig& cfg, const Potential& potential,
                  const Free& free) {
  const long n = step_count(cfg);
  const int every = std::max(cfg.record_every, 1);
  Trajectory traj;
  EnvelopeField env = env0;
  env.time = cfg.t_start;
  traj.frames.push_back(env);
  if (n == 0) return traj;
  const double dt = cfg.dt;
  potential(env, 0.5 * dt, cfg.t_start);
  for (long i = 0; i < n; ++i) {
    free(env);
    const double t = cfg.t_start + static_cast<double>(i + 1) * dt;
    const bool record = (i + 1) % every == 0 || i + 1 == n;
    if (record) {
      potential(env, 0.5 * dt, t);
      env.time = t;
      traj.frames.push_back(env);
      if (i + 1 < n) potential(env, 0.5 * dt, t);
    } else {
      potential(env, dt, t);
    }
  }
  return traj;
}

void apply_macro_blocks(EnvelopeField& env, const kernels::Blocks& blocks) {
  Eigen::MatrixXcd f = envelope_on_macro(env);
  kernels::block_matvec(blocks, f);
  const double time = env.time;
  env = envelope_from_macro(env.grid, f);
  env.time = time;
}

// Precomputed collocated exponentials for the two step sizes a Strang run uses.
struct CollocatedSteps {
  kernels::Blocks half;
  kernels::Blocks full;
  double dt = 0.0;
  bool zero = false;

  CollocatedSteps(const BandProjectedPotential& bpp, const GridPtr& grid, double step) : dt(step) {
    zero = bpp.is_zero();
    if (zero) return;
    const CollocatedPotential col(bpp, grid);
    half = col.exponentials(0.5 * step);
    full = col.exponentials(step);
  }

  void apply(EnvelopeField& env, double tau) const {
    if (zero) return;
    apply_macro_blocks(env, std::abs(tau - dt) < 1e-3 * std::abs(dt) ? full : half);
  }
};

void check_bands(const EnvelopeField& env, int n_bands) {
  if (env.n_bands() != n_bands) raise(ErrorKind::GridMismatch, "envelope band count does not match the model");
}

}  // namespace

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  for (const auto& f : frames) out.push_back(f.time);
  return out;
}

std::vector<double> Trajectory::norms() const {
  std::vector<double> out;
  for (const auto& f : frames) out.push_back(l2_norm(f));
  return out;
}

long step_count(const PropagatorConfig& cfg) {
  if (cfg.dt == 0.0 || !std::isfinite(cfg.dt)) raise(ErrorKind::InvalidArgument, "dt must be finite and nonzero");
  const double span = cfg.t_final - cfg.t_start;
  const double steps = span / cfg.dt;
  const long n = std::lround(steps);
  if (n < 0 || std::abs(steps - n) > 1e-6) {
    std::ostringstream os;
    os << "time span " << span << " is not a nonnegative whole number of steps dt=" << cfg.dt;
    raise(ErrorKind::InvalidArgument, os.str());
  }
  return n;
}

double fit_step(double interval, double dt_max) {
  if (!(interval > 0.0) || !(dt_max > 0.0)) raise(ErrorKind::InvalidArgument, "interval and dt_max must be positive");
  const double n = std::ceil(interval / dt_max - 1e-9);
  return interval / std::max(n, 1.0);
}

kernels::Blocks kp_free_blocks(const BandBasis& bb, const MacroGrid& grid, double dt, int n_bands) {
  const BandBasis sub = leading_bands(bb, n_bands < 0 ? bb.n_bands : n_bands);
  const double e2 = grid.eps * grid.eps;
  kernels::Blocks h(grid.n_k);
  for (long r = 0; r < grid.n_k; ++r) h[r] = fiber_matrix(sub, grid.eps * grid.k_points[r]) / e2;
  kernels::Blocks out;
  kernels::hermitian_exponentials(h, dt, out);
  return out;
}

Eigen::MatrixXcd em_free_phases(const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                                const MacroGrid& grid, double dt, bool with_energy) {
  const int nb = static_cast<int>(inverse_masses.size());
  if (nb > bb.n_bands && with_energy) raise(ErrorKind::BasisTooSmall, "more masses than band energies");
  Eigen::MatrixXcd out(nb, grid.n_k);
  const double e2 = grid.eps * grid.eps;
  for (long r = 0; r < grid.n_k; ++r) {
    const Eigen::VectorXd& k = grid.k_points[r];
    for (int n = 0; n < nb; ++n) {
      double omega = 0.5 * k.dot(inverse_masses[n] * k);
      if (with_energy) omega += bb.energies[n] / e2;
      out(n, r) = std::polar(1.0, -dt * omega);
    }
  }
  return out;
}

FineTrajectory evolve_schrodinger(const Eigen::VectorXcd& psi0, const GridPtr& grid, const PeriodicPotentialSpec& w,
                                  const ExternalPotentialSpec& v, const PropagatorConfig& cfg) {
  const MacroGrid& g = *grid;
  if (psi0.size() != g.n_fine) raise(ErrorKind::GridMismatch, "initial field does not match the fine grid");
  ExternalPotentialSpec cell = ExternalPotentialSpec::zero(g.dim, g.box_cells);
  for (const auto& [z, c] : w.coefficients) cell.terms.push_back({IntVec(g.dim, 0), z, c});
  const Eigen::VectorXd total =
      (sample_fine(cell, g) / (g.eps * g.eps) + (v.terms.empty() ? Eigen::VectorXcd::Zero(g.n_fine) : sample_fine(v, g)))
          .real();
  const double dt = cfg.dt;
  Eigen::VectorXcd half(g.n_fine), full(g.n_fine), kinetic(g.n_fine);
  for (long s = 0; s < g.n_fine; ++s) {
    half[s] = std::polar(1.0, -0.5 * dt * total[s]);
    full[s] = std::polar(1.0, -dt * total[s]);
    kinetic[s] = std::polar(1.0 / g.n_fine, -0.5 * dt * g.fine_wavevector(s).squaredNorm());
  }

  const long n = step_count(cfg);
  const int every = std::max(cfg.record_every, 1);
  FineTrajectory traj;
  traj.grid = grid;
  traj.times.push_back(cfg.t_start);
  traj.frames.push_back(psi0);
  if (n == 0) return traj;
  Eigen::VectorXcd psi = psi0;
  Eigen::VectorXcd buf(g.n_fine);
  kernels::scale_pointwise(half, psi);
  for (long i = 0; i < n; ++i) {
    g.fine_fft->forward(psi.data(), buf.data());
    kernels::scale_pointwise(kinetic, buf);
    g.fine_fft->inverse(buf.data(), psi.data());
    const bool record = (i + 1) % every == 0 || i + 1 == n;
    if (record) {
      kernels::scale_pointwise(half, psi);
      traj.times.push_back(cfg.t_start + static_cast<double>(i + 1) * dt);
      traj.frames.push_back(psi);
      if (i + 1 < n) kernels::scale_pointwise(half, psi);
    } else {
      kernels::scale_pointwise(full, psi);
    }
  }
  return traj;
}

Trajectory evolve_kp(const EnvelopeField& env0, const BandBasis& bb, const BandProjectedPotential& bpp,
                     const PropagatorConfig& cfg, const ExternalPotentialSpec* exact_potential) {
  const int nb = env0.n_bands();
  const kernels::Blocks free_blocks = kp_free_blocks(bb, *env0.grid, cfg.dt, nb);
  const Free free = [&](EnvelopeField& env) { kernels::block_matvec(free_blocks, env.g); };
  if (exact_potential != nullptr) {
    const ExactPotential op(*exact_potential, bb, env0.grid, nb);
    const bool zero = exact_potential->terms.empty();
    return strang(env0, cfg,
                  [&](EnvelopeField& env, double tau, double) {
                    if (!zero) env = op.exponential(env, tau);
                  },
                  free);
  }
  check_bands(env0, bpp.n_bands);
  const CollocatedSteps steps(bpp, env0.grid, cfg.dt);
  return strang(env0, cfg, [&](EnvelopeField& env, double tau, double) { steps.apply(env, tau); }, free);
}

Trajectory evolve_em(const EnvelopeField& env0, const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                     const BandProjectedPotential& bpp, const PropagatorConfig& cfg) {
  check_bands(env0, static_cast<int>(inverse_masses.size()));
  check_bands(env0, bpp.n_bands);
  const Eigen::MatrixXcd phases = em_free_phases(bb, inverse_masses, *env0.grid, cfg.dt, true);
  const CollocatedSteps steps(bpp, env0.grid, cfg.dt);
  return strang(env0, cfg, [&](EnvelopeField& env, double tau, double) { steps.apply(env, tau); },
                [&](EnvelopeField& env) { kernels::scale_elements(phases, env.g); });
}

Trajectory evolve_filtered(const EnvelopeField& h0, const BandBasis& bb,
                           const std::vector<Eigen::MatrixXd>& inverse_masses, const BandProjectedPotential& bpp,
                           const PropagatorConfig& cfg) {
  check_bands(h0, static_cast<int>(inverse_masses.size()));
  check_bands(h0, bpp.n_bands);
  const MacroGrid& grid = *h0.grid;
  if (std::abs(cfg.dt) > cfg.dt_factor * grid.eps * grid.eps * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "filtered system needs |dt| <= " << cfg.dt_factor << " eps^2 = " << cfg.dt_factor * grid.eps * grid.eps;
    raise(ErrorKind::StepTooLarge, os.str());
  }
  const Eigen::MatrixXcd phases = em_free_phases(bb, inverse_masses, grid, cfg.dt, false);
  const CollocatedSteps steps(bpp, h0.grid, cfg.dt);
  const Eigen::VectorXd energies = bb.energies.head(h0.n_bands());
  // The coupling exp(i (E_n - E_n') t / eps^2) V_{nn'} is D(t) V D(t)^*, so its exponential is
  // D(t) exp(-i tau V) D(t)^*, evaluated at the step endpoints.
  return strang(h0, cfg,
                [&](EnvelopeField& env, double tau, double t) {
                  if (steps.zero) return;
                  env = apply_band_gauge(env, energies, t, 1.0);
                  steps.apply(env, tau);
                  env = apply_band_gauge(env, energies, t, -1.0);
                },
                [&](EnvelopeField& env) { kernels::scale_elements(phases, env.g); });
}

Trajectory evolve_limit(const EnvelopeField& h0, const std::vector<Eigen::MatrixXd>& inverse_masses,
                        const BandProjectedPotential& bpp, const PropagatorConfig& cfg) {
  check_bands(h0, static_cast<int>(inverse_masses.size()));
  check_bands(h0, bpp.n_bands);
  BandBasis none;
  const Eigen::MatrixXcd phases = em_free_phases(none, inverse_masses, *h0.grid, cfg.dt, false);
  const CollocatedSteps steps(bpp.diagonal(), h0.grid, cfg.dt);
  return strang(h0, cfg, [&](EnvelopeField& env, double tau, double) { steps.apply(env, tau); },
                [&](EnvelopeField& env) { kernels::scale_elements(phases, env.g); });
}

EnvelopeField apply_band_gauge(const EnvelopeField& env, const Eigen::VectorXd& energies, double t, double sign) {
  if (energies.size() < env.n_bands()) raise(ErrorKind::GridMismatch, "not enough band energies for the gauge");
  EnvelopeField out = env;
  const double e2 = env.grid->eps * env.grid->eps;
  for (int n = 0; n < env.n_bands(); ++n) out.g.row(n) *= std::polar(1.0, -sign * energies[n] * t / e2);
  return out;
}

double free_flow_gap(const EnvelopeField& g, const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                     double t) {
  const int nb = g.n_bands();
  if (static_cast<int>(inverse_masses.size()) < nb) raise(ErrorKind::InvalidArgument, "missing effective masses");
  const BandBasis sub = leading_bands(bb, nb);
  const MacroGrid& grid = *g.grid;
  const double e2 = grid.eps * grid.eps;
  double sum = 0.0;
  for (long r = 0; r < grid.n_k; ++r) {
    if (g.g.col(r).squaredNorm() == 0.0) continue;
    const Eigen::VectorXd xi = grid.eps * grid.k_points[r];
    const Eigen::VectorXd lam = diagonalize_fiber(sub, xi).lambdas;
    for (int n = 0; n < nb; ++n) {
      const double lam2 = sub.energies[n] + 0.5 * xi.dot(inverse_masses[n] * xi);
      // |exp(-i a) - exp(-i b)| = |2 sin((a - b) / 2)|
      const double factor = 2.0 * std::sin(0.5 * t * (lam[n] - lam2) / e2);
      sum += factor * factor * std::norm(g.g(n, r));
    }
  }
  return std::sqrt(sum * grid.dk);
}

std::vector<double> model_gap(const Trajectory& a, const Trajectory& b) {
  if (a.frames.size() != b.frames.size()) raise(ErrorKind::GridMismatch, "trajectories have different sample counts");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const auto& fa = a.frames[i];
    const auto& fb = b.frames[i];
    if (std::abs(fa.time - fb.time) > 1e-9 * (1.0 + std::abs(fa.time)))
      raise(ErrorKind::GridMismatch, "trajectories are sampled at different times");
    if (!same_grid(*fa.grid, *fb.grid) || fa.n_bands() != fb.n_bands())
      raise(ErrorKind::GridMismatch, "trajectories live on different grids");
    out.push_back(std::sqrt((fa.g - fb.g).squaredNorm() * fa.grid->dk));
  }
  return out;
}

double density_observable(const MacroGrid& grid, const Eigen::VectorXcd& psi, const TestFunction& theta) {
  return weighted_mass(grid, psi, theta);
}

double density_observable(const EnvelopeField& h, const TestFunction& theta) { return weighted_band_mass(h, theta); }

}  // namespace envkp
