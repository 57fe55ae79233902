#include "envkp/checks.hpp"

#include "envkp/dynamics.hpp"
#include "envkp/error.hpp"
#include "envkp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace envkp {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CheckItem item(const std::string& name, double margin, const std::string& detail) {
  return {name, margin, margin >= 0.0, detail};
}

double max_step_drift(const Trajectory& traj) {
  const auto norms = traj.norms();
  double drift = 0.0;
  for (std::size_t i = 1; i < norms.size(); ++i) drift = std::max(drift, std::abs(norms[i] - norms[i - 1]));
  return drift;
}

double field_distance(const EnvelopeField& a, const EnvelopeField& b) {
  return std::sqrt((a.g - b.g).squaredNorm() * a.grid->dk);
}

}  // namespace

bool CheckReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.pass; });
}

EnvelopeField random_envelope(const GridPtr& grid, int n_bands, std::mt19937_64& rng, double decay) {
  std::normal_distribution<double> normal;
  EnvelopeField env = zero_field(grid, n_bands);
  for (long r = 0; r < grid->n_k; ++r) {
    const double damp = std::pow(1.0 + grid->k_points[r].squaredNorm(), -decay / 2.0);
    for (int n = 0; n < n_bands; ++n) {
      const double re = normal(rng);
      const double im = normal(rng);
      env.g(n, r) = cdouble(re, im) * damp;
    }
  }
  env.g /= l2_norm(env);
  return env;
}

CheckReport run_checks(const ExperimentConfig& cfg, std::uint64_t seed, int samples) {
  validate_config(cfg);
  CheckReport rep;
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  const PeriodicPotentialSpec w = config_periodic(cfg);
  const BandBasis bb = solve_cell(w, cfg.cutoff, cfg.bands, cfg.gap_tol);
  const auto masses = effective_masses(bb);
  const ExternalPotentialSpec& v = cfg.external;
  const BandProjectedPotential bpp = band_project(v, bb);
  const double eps = cfg.eps.front();
  const GridPtr grid = make_grid(bb.geom, eps, cfg.box_cells, cfg.q);
  const BandTransform transform(bb, grid);
  const int nb = bb.n_bands;

  double parseval = 0.0, round_trip = 0.0;
  for (int s = 0; s < samples; ++s) {
    const EnvelopeField g = random_envelope(grid, nb, rng);
    const Eigen::VectorXcd psi = transform.reconstruct(g);
    const EnvelopeField back = transform.decompose(psi);
    parseval = std::max(parseval, std::abs(fine_norm(*grid, psi) - l2_norm(g)));
    round_trip = std::max(round_trip, field_distance(back, g));
  }
  rep.items.push_back(item("parseval", 1e-10 - parseval, "max |norm(psi) - norm(g)| = " + fmt(parseval)));
  rep.items.push_back(item("round_trip", 1e-10 - round_trip, "max |decompose(reconstruct g) - g| = " + fmt(round_trip)));

  const double vsup = sup_norm(v, bb.geom);
  const ExactPotential exact(v, bb, grid);
  double slack_exact = vsup, slack_homogenized = vsup;
  for (int s = 0; s < samples; ++s) {
    const EnvelopeField g = random_envelope(grid, nb, rng);
    slack_exact = std::min(slack_exact, vsup * l2_norm(g) - l2_norm(exact.apply(g).field));
    slack_homogenized = std::min(slack_homogenized, vsup * l2_norm(g) - l2_norm(apply_U0(g, bpp)));
  }
  const std::string sup_text = "sup|V| = " + fmt(vsup);
  rep.items.push_back(item("norm_bound_exact", slack_exact + 1e-12, sup_text));
  rep.items.push_back(item("norm_bound_homogenized", slack_homogenized + 1e-12, sup_text));

  {
    const ExternalPotentialSpec vs = smooth_potential(v, bb.geom, eps);
    const BandProjectedPotential bs = band_project(vs, bb);
    double gap = 0.0;
    for (int s = 0; s < samples; ++s) {
      const EnvelopeField g = truncate(random_envelope(grid, nb, rng), 1.0 / (3.0 * eps));
      gap = std::max(gap, field_distance(apply_Ueps(g, vs, bb).field, apply_U0(g, bs)));
    }
    rep.items.push_back(item("small_support_identity", 1e-10 - gap, "max |U^eps g - U^0 g| = " + fmt(gap)));
  }

  {
    const int full = static_cast<int>(bb.basis.size());
    const BandBasis all = solve_cell(w, cfg.cutoff, full, 0.0);
    double growth = INFINITY, lower = INFINITY;
    for (double r : {0.1, 0.5, 1.0}) {
      for (int a = 0; a < bb.geom.dim; ++a) {
        Eigen::VectorXd xi = Eigen::VectorXd::Zero(bb.geom.dim);
        xi[a] = r;
        try {
          const BandGrowthReport growth_rep = band_growth_margin(all, xi);
          growth = std::min(growth, growth_rep.growth_margin);
          lower = std::min(lower, growth_rep.lower_bound_margin);
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::BoundViolated) throw;
          growth = -1.0;
        }
      }
    }
    rep.items.push_back(item("band_growth", growth, "min margin " + fmt(growth)));
    rep.items.push_back(item("band_lower_bound", lower, "min margin " + fmt(lower)));
  }

  {
    double worst = INFINITY;
    std::string detail;
    for (double mu : {1.0, 2.0}) {
      for (int s = 0; s < samples / 4 + 1; ++s) {
        const EnvelopeField g = random_envelope(grid, nb, rng, mu + 1.0);
        try {
          const TwoScaleGap gap = two_scale_gap(v, bb, g, mu);
          const double margin = gap.bound + gap.residual - gap.measured;
          if (margin < worst) {
            worst = margin;
            detail = "mu = " + fmt(mu) + ", measured " + fmt(gap.measured) + ", bound " + fmt(gap.bound);
          }
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::BoundViolated) throw;
          worst = -1.0;
          detail = e.what();
        }
      }
    }
    rep.items.push_back(item("two_scale_bound", worst, detail));
  }

  {
    const EnvelopeField g0 = random_envelope(grid, nb, rng);
    PropagatorConfig pc;
    pc.dt = cfg.dt_factor * eps * eps;
    pc.t_final = 20 * pc.dt;
    pc.dt_factor = cfg.dt_factor;
    PropagatorConfig back = pc;
    back.dt = -pc.dt;
    back.t_start = pc.t_final;
    back.t_final = 0.0;

    struct Run {
      std::string name;
      std::function<Trajectory(const EnvelopeField&, const PropagatorConfig&)> run;
    };
    const std::vector<Run> runs = {
        {"exact", [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_kp(g, bb, bpp, c, &v); }},
        {"kp", [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_kp(g, bb, bpp, c); }},
        {"em", [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_em(g, bb, masses, bpp, c); }},
        {"filtered",
         [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_filtered(g, bb, masses, bpp, c); }},
        {"limit", [&](const EnvelopeField& g, const PropagatorConfig& c) { return evolve_limit(g, masses, bpp, c); }},
    };
    for (const auto& r : runs) {
      const Trajectory fwd = r.run(g0, pc);
      EnvelopeField end = fwd.frames.back();
      const Trajectory bwd = r.run(end, back);
      const double drift = std::max(max_step_drift(fwd), max_step_drift(bwd));
      const double recovery = field_distance(bwd.frames.back(), g0);
      rep.items.push_back(item("unitarity_" + r.name, 1e-10 - drift, "max norm drift per step " + fmt(drift)));
      rep.items.push_back(item("reversibility_" + r.name, 1e-8 - recovery, "recovery error " + fmt(recovery)));
    }

    const Eigen::VectorXcd psi0 = transform.reconstruct(g0);
    const FineTrajectory fine = evolve_schrodinger(psi0, grid, w, v, pc);
    double drift = 0.0;
    for (std::size_t i = 1; i < fine.frames.size(); ++i)
      drift = std::max(drift, std::abs(fine_norm(*grid, fine.frames[i]) - fine_norm(*grid, fine.frames[i - 1])));
    rep.items.push_back(item("unitarity_schrodinger", 1e-10 - drift, "max norm drift per step " + fmt(drift)));
  }
  return rep;
}

}  // namespace envkp
