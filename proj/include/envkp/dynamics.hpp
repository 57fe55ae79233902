#pragma once

#include "envkp/bloch.hpp"
#include "envkp/envelope.hpp"
#include "envkp/kernels.hpp"
#include "envkp/potential.hpp"

#include <Eigen/Dense>

#include <vector>

namespace envkp {

struct PropagatorConfig {
  /// Signed time step; negative steps run backwards from t_start to t_final.
  double dt = 1e-3;
  double t_start = 0.0;
  double t_final = 0.0;
  int record_every = 1;
  /// Filtered system requires |dt| <= dt_factor * eps^2.
  double dt_factor = 0.1;
};

struct Trajectory {
  std::vector<EnvelopeField> frames;

  std::vector<double> times() const;
  std::vector<double> norms() const;
};

struct FineTrajectory {
  GridPtr grid;
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> frames;
};

/// Number of steps from t_start to t_final; throws InvalidArgument unless it is a whole number.
long step_count(const PropagatorConfig& cfg);

/// Largest step interval/n (n a positive integer) not exceeding dt_max, so records fall on steps.
double fit_step(double interval, double dt_max);

/// exp(-i dt A(eps k) / eps^2) for every k-grid point.
kernels::Blocks kp_free_blocks(const BandBasis& bb, const MacroGrid& grid, double dt, int n_bands = -1);

/// exp(-i dt (E_n / eps^2 [if with_energy] + k.M_n^{-1} k / 2)) per band and k-grid point.
Eigen::MatrixXcd em_free_phases(const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                                const MacroGrid& grid, double dt, bool with_energy);

FineTrajectory evolve_schrodinger(const Eigen::VectorXcd& psi0, const GridPtr& grid, const PeriodicPotentialSpec& w,
                                  const ExternalPotentialSpec& v, const PropagatorConfig& cfg);

/// k.p system. With exact_potential set, the potential step uses the two-scale operator U^eps
/// (the exact envelope system) instead of the band-projected collocation.
Trajectory evolve_kp(const EnvelopeField& env0, const BandBasis& bb, const BandProjectedPotential& bpp,
                     const PropagatorConfig& cfg, const ExternalPotentialSpec* exact_potential = nullptr);

Trajectory evolve_em(const EnvelopeField& env0, const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                     const BandProjectedPotential& bpp, const PropagatorConfig& cfg);

Trajectory evolve_filtered(const EnvelopeField& h0, const BandBasis& bb,
                           const std::vector<Eigen::MatrixXd>& inverse_masses, const BandProjectedPotential& bpp,
                           const PropagatorConfig& cfg);

/// Homogenized limit; only the band-diagonal part of bpp is used.
Trajectory evolve_limit(const EnvelopeField& h0, const std::vector<Eigen::MatrixXd>& inverse_masses,
                        const BandProjectedPotential& bpp, const PropagatorConfig& cfg);

/// Multiplies band n by exp(-i sign E_n t / eps^2): sign = +1 maps filtered to effective-mass gauge.
EnvelopeField apply_band_gauge(const EnvelopeField& env, const Eigen::VectorXd& energies, double t, double sign);

/// |(exp(-i t Lambda(eps k)/eps^2) - exp(-i t Lambda2(eps k)/eps^2)) g| with Lambda2 = E_n + xi.M_n^{-1} xi / 2.
double free_flow_gap(const EnvelopeField& g, const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses,
                     double t);

/// |g_a(t) - g_b(t)| at each common recorded time.
std::vector<double> model_gap(const Trajectory& a, const Trajectory& b);

double density_observable(const MacroGrid& grid, const Eigen::VectorXcd& psi, const TestFunction& theta);
double density_observable(const EnvelopeField& h, const TestFunction& theta);

}  // namespace envkp
