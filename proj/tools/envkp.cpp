#include "envkp/checks.hpp"
#include "envkp/dynamics.hpp"
#include "envkp/error.hpp"
#include "envkp/harness.hpp"
#include "envkp/io.hpp"
#include "envkp/kernels.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace envkp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfigError = 2;

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> eps;
  std::uint64_t seed = 0;
  int threads = 1;
  int points = 64;
  std::string scheme = "kp";
};

struct Setup {
  ExperimentConfig cfg;
  PeriodicPotentialSpec w;
  BandBasis bb;
  std::vector<Eigen::MatrixXd> masses;
  std::string out;
};

Setup prepare(const Options& opt) {
  Setup s;
  s.cfg = opt.config.empty() ? default_config() : load_config(opt.config);
  if (!opt.eps.empty()) {
    s.cfg.eps.clear();
    for (const auto& e : opt.eps) s.cfg.eps.push_back(parse_number(e));
  }
  validate_config(s.cfg);
  s.w = config_periodic(s.cfg);
  s.bb = solve_cell(s.w, s.cfg.cutoff, s.cfg.bands, s.cfg.gap_tol);
  s.masses = effective_masses(s.bb);
  s.out = opt.out.empty() ? s.cfg.output_dir : opt.out;
  return s;
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

int cmd_bands(const Options& opt, const Setup& s) {
  write_bands_csv(path_in(s.out, "bands.csv"), sample_bands(s.bb, opt.points));
  write_json(path_in(s.out, "bands.json"), bands_json(s.bb, s.masses));
  std::cout << "wrote " << path_in(s.out, "bands.csv") << " and bands.json\n";
  return kPass;
}

int cmd_decompose(const Options&, const Setup& s) {
  const double eps = s.cfg.eps.front();
  const GridPtr grid = make_grid(s.bb.geom, eps, s.cfg.box_cells, s.cfg.q);
  const BandTransform transform(s.bb, grid);
  const EnvelopeField g = initial_envelope(s.cfg.initial, grid, s.bb.n_bands);
  const Eigen::VectorXcd psi = transform.reconstruct(g);
  const EnvelopeField back = transform.decompose(psi);
  const double gap = std::abs(fine_norm(*grid, psi) - l2_norm(back));
  const double round_trip = std::sqrt((back.g - g.g).squaredNorm() * grid->dk);
  write_snapshot(path_in(s.out, "decompose.envf"), back);
  write_density_csv(path_in(s.out, "decompose_density.csv"), back);
  nlohmann::json j = {{"schema", 1},
                      {"eps", eps},
                      {"norm_psi", fine_norm(*grid, psi)},
                      {"norm_envelope", l2_norm(back)},
                      {"parseval_gap", gap},
                      {"round_trip", round_trip},
                      {"pass", gap <= 1e-10 && round_trip <= 1e-10}};
  write_json(path_in(s.out, "decompose.json"), j);
  std::cout << j.dump(2) << '\n';
  return j["pass"].get<bool>() ? kPass : kFail;
}

int cmd_evolve(const Options& opt, const Setup& s) {
  const ExperimentConfig& cfg = s.cfg;
  const double eps = cfg.eps.front();
  const GridPtr grid = make_grid(s.bb.geom, eps, cfg.box_cells, cfg.q);
  const BandProjectedPotential bpp = band_project(cfg.external, s.bb);
  const EnvelopeField g0 = initial_envelope(cfg.initial, grid, s.bb.n_bands);
  PropagatorConfig pc;
  pc.dt = fit_step(cfg.tau / cfg.samples, std::min(cfg.dt_max, cfg.dt_factor * eps * eps));
  pc.t_final = cfg.tau;
  pc.record_every = static_cast<int>(std::lround(cfg.tau / cfg.samples / pc.dt));
  pc.dt_factor = cfg.dt_factor;

  Trajectory traj;
  if (opt.scheme == "exact") {
    traj = evolve_kp(g0, s.bb, bpp, pc, &cfg.external);
  } else if (opt.scheme == "kp") {
    traj = evolve_kp(g0, s.bb, bpp, pc);
  } else if (opt.scheme == "em") {
    traj = evolve_em(g0, s.bb, s.masses, bpp, pc);
  } else if (opt.scheme == "filtered") {
    traj = evolve_filtered(g0, s.bb, s.masses, bpp, pc);
  } else if (opt.scheme == "limit") {
    traj = evolve_limit(g0, s.masses, bpp, pc);
  } else {
    const BandTransform transform(s.bb, grid);
    const FineTrajectory fine = evolve_schrodinger(transform.reconstruct(g0), grid, s.w, cfg.external, pc);
    for (std::size_t i = 0; i < fine.frames.size(); ++i) {
      EnvelopeField f = transform.decompose(fine.frames[i]);
      f.time = fine.times[i];
      traj.frames.push_back(std::move(f));
    }
  }
  const std::string dir = path_in(s.out, "trajectory_" + opt.scheme);
  write_trajectory(dir, traj, opt.scheme, pc.dt);
  const auto norms = traj.norms();
  std::cout << "scheme " << opt.scheme << ", eps " << eps << ", dt " << pc.dt << ", " << traj.frames.size()
            << " frames, norm drift " << std::abs(norms.back() - norms.front()) << ", wrote " << dir << '\n';
  return kPass;
}

int cmd_sweep(const Options& opt, const Setup& s) {
  const SweepResult res = run_sweep(s.cfg, opt.threads);
  write_json(path_in(s.out, "report.json"), report_json(res));
  write_report_csv(path_in(s.out, "report.csv"), res);
  for (const auto& r : res.reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.quantity;
    if (r.fitted && r.has_rate) std::cout << " slope " << r.fit.slope << " (required " << r.required_slope << ")";
    if (!r.has_rate) std::cout << " ratio " << r.trend_ratio;
    std::cout << (r.monotone ? " monotone" : " not monotone");
    if (!r.note.empty()) std::cout << " [" << r.note << "]";
    std::cout << '\n';
  }
  std::cout << "config " << res.hash << ", wrote " << path_in(s.out, "report.json") << '\n';
  return res.pass() ? kPass : kFail;
}

int cmd_check(const Options& opt, const Setup& s) {
  const CheckReport rep = run_checks(s.cfg, opt.seed);
  nlohmann::json items = nlohmann::json::object();
  for (const auto& i : rep.items) items[i.name] = {{"margin", i.margin}, {"pass", i.pass}, {"detail", i.detail}};
  nlohmann::json j = {{"schema", 1}, {"seed", rep.seed}, {"pass", rep.pass()}, {"checks", items}};
  write_json(path_in(s.out, "check.json"), j);
  std::cout << j.dump(2) << '\n';
  return rep.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"envkp: envelope, k.p and effective-mass models of periodic Schrodinger dynamics"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config, "Configuration file (INI)")->check(CLI::ExistingFile);
  app.add_option("--out", opt.out, "Output directory (default: output.dir from the config)");
  app.add_option("--eps", opt.eps, "Override the eps list, e.g. --eps 1/4 1/8");
  app.add_option("--seed", opt.seed, "Seed for randomized property inputs");
  app.add_option("--threads", opt.threads, "Worker threads for kernels and sweeps")->check(CLI::PositiveNumber);

  auto* bands = app.add_subcommand("bands", "Band structure and effective masses");
  bands->add_option("--points", opt.points, "Samples per zone direction")->check(CLI::PositiveNumber);
  app.add_subcommand("decompose", "Decompose a synthesized field and report the Parseval gap");
  auto* evolve = app.add_subcommand("evolve", "Single run with trajectory export");
  evolve->add_option("--scheme", opt.scheme, "exact, kp, em, filtered, limit or schrodinger")
      ->check(CLI::IsMember({"exact", "kp", "em", "filtered", "limit", "schrodinger"}));
  app.add_subcommand("sweep", "eps sweep with fitted convergence rates");
  app.add_subcommand("check", "Property battery with invariant margins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  if (opt.threads > 1) {
    kernels::set_policy(kernels::Policy::OpenMP);
    kernels::set_threads(opt.threads);
  } else {
    kernels::set_policy(kernels::Policy::Serial);
  }

  Setup setup;
  try {
    setup = prepare(opt);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "bands") return cmd_bands(opt, setup);
    if (name == "decompose") return cmd_decompose(opt, setup);
    if (name == "evolve") return cmd_evolve(opt, setup);
    if (name == "sweep") return cmd_sweep(opt, setup);
    return cmd_check(opt, setup);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
