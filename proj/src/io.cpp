#include "envkp/io.hpp"

#include "envkp/error.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace envkp {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'E', 'N', 'V', 'F'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& is, const std::string& path) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) raise(ErrorKind::Io, "truncated snapshot " + path);
  return v;
}

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream os(path, mode);
  if (!os) raise(ErrorKind::Io, "cannot write " + path);
  os << std::setprecision(17);
  return os;
}

void write_point(std::ostream& os, const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) os << x[i] << ',';
}

std::string coordinate_header(const std::string& name, long d) {
  std::string out;
  for (long i = 1; i <= d; ++i) out += name + "_" + std::to_string(i) + ",";
  return out;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void write_snapshot(const std::string& path, const EnvelopeField& env) {
  if (!env.grid) raise(ErrorKind::InvalidArgument, "field has no grid");
  const MacroGrid& grid = *env.grid;
  std::ofstream os = open_out(path, std::ios::binary);
  os.write(kMagic, 4);
  put<std::int32_t>(os, grid.dim);
  put<double>(os, grid.eps);
  put<std::int32_t>(os, env.n_bands());
  put<std::int32_t>(os, grid.m);
  put<std::int32_t>(os, grid.q);
  put<double>(os, env.time);
  for (int n = 0; n < env.n_bands(); ++n) {
    for (long r = 0; r < grid.n_k; ++r) {
      put<float>(os, static_cast<float>(env.g(n, r).real()));
      put<float>(os, static_cast<float>(env.g(n, r).imag()));
    }
  }
  if (!os) raise(ErrorKind::Io, "write failed for " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorKind::Io, "cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) raise(ErrorKind::Io, "not a snapshot: " + path);
  Snapshot s;
  s.dim = take<std::int32_t>(is, path);
  s.eps = take<double>(is, path);
  s.n_bands = take<std::int32_t>(is, path);
  s.m = take<std::int32_t>(is, path);
  s.q = take<std::int32_t>(is, path);
  s.time = take<double>(is, path);
  if (s.dim < 1 || s.dim > 3 || s.n_bands < 0 || s.m < 1) raise(ErrorKind::Io, "corrupt snapshot header in " + path);
  long n_k = 1;
  for (int i = 0; i < s.dim; ++i) n_k *= s.m;
  s.values.resize(s.n_bands, n_k);
  for (int n = 0; n < s.n_bands; ++n) {
    for (long r = 0; r < n_k; ++r) {
      const float re = take<float>(is, path);
      const float im = take<float>(is, path);
      s.values(n, r) = cdouble(re, im);
    }
  }
  return s;
}

EnvelopeField load_field(const std::string& path, const GridPtr& grid) {
  Snapshot s = read_snapshot(path);
  if (s.dim != grid->dim || s.m != grid->m || s.q != grid->q || std::abs(s.eps - grid->eps) > 1e-12 * grid->eps)
    raise(ErrorKind::GridMismatch, "snapshot " + path + " was written on a different grid");
  EnvelopeField env;
  env.grid = grid;
  env.g = std::move(s.values);
  env.time = s.time;
  return env;
}

void write_density_csv(const std::string& path, const EnvelopeField& env) {
  const MacroGrid& grid = *env.grid;
  std::ofstream os = open_out(path);
  os << coordinate_header("k", grid.dim) << "n,abs2\n";
  for (int n = 0; n < env.n_bands(); ++n) {
    for (long r = 0; r < grid.n_k; ++r) {
      write_point(os, grid.k_points[r]);
      os << n + 1 << ',' << std::norm(env.g(n, r)) << '\n';
    }
  }
}

void write_trajectory(const std::string& dir, const Trajectory& traj, const std::string& scheme, double dt) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorKind::Io, "cannot create " + dir + ": " + ec.message());
  nlohmann::json meta;
  meta["schema"] = 1;
  meta["scheme"] = scheme;
  meta["dt"] = dt;
  nlohmann::json frames = nlohmann::json::array();
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << i << ".envf";
    write_snapshot((std::filesystem::path(dir) / name.str()).string(), traj.frames[i]);
    frames.push_back({{"file", name.str()}, {"time", traj.frames[i].time}, {"norm", l2_norm(traj.frames[i])}});
  }
  if (!traj.frames.empty()) {
    meta["eps"] = traj.frames.front().grid->eps;
    meta["bands"] = traj.frames.front().n_bands();
    meta["m"] = traj.frames.front().grid->m;
    meta["q"] = traj.frames.front().grid->q;
  }
  meta["frames"] = frames;
  write_json((std::filesystem::path(dir) / "metadata.json").string(), meta);
}

BandTable sample_bands(const BandBasis& bb, int n_per_dim) {
  if (n_per_dim < 1) raise(ErrorKind::InvalidArgument, "n_per_dim must be positive");
  const int d = bb.geom.dim;
  BandTable out;
  for (const IntVec& i : integer_box(d, 0, n_per_dim)) {
    Eigen::VectorXd u(d);
    for (int a = 0; a < d; ++a) u[a] = -0.5 + static_cast<double>(i[a]) / n_per_dim;
    const Eigen::VectorXd xi = bb.geom.reciprocal_matrix * u;
    out.xi.push_back(xi);
    out.lambdas.push_back(diagonalize_fiber(bb, xi).lambdas);
  }
  return out;
}

void write_bands_csv(const std::string& path, const BandTable& table) {
  std::ofstream os = open_out(path);
  const long d = table.xi.empty() ? 0 : table.xi.front().size();
  os << coordinate_header("xi", d) << "n,lambda\n";
  for (std::size_t i = 0; i < table.xi.size(); ++i) {
    for (Eigen::Index n = 0; n < table.lambdas[i].size(); ++n) {
      write_point(os, table.xi[i]);
      os << n + 1 << ',' << table.lambdas[i][n] << '\n';
    }
  }
}

nlohmann::json bands_json(const BandBasis& bb, const std::vector<Eigen::MatrixXd>& inverse_masses) {
  nlohmann::json out;
  out["schema"] = 1;
  out["dim"] = bb.geom.dim;
  out["bands"] = bb.n_bands;
  out["basis_size"] = bb.basis.size();
  nlohmann::json bands = nlohmann::json::array();
  for (int n = 0; n < bb.n_bands; ++n) {
    nlohmann::json b;
    b["n"] = n + 1;
    b["energy"] = bb.energies[n];
    if (n < static_cast<int>(inverse_masses.size())) b["inverse_mass"] = matrix_json(inverse_masses[n]);
    bands.push_back(b);
  }
  out["bands_detail"] = bands;
  nlohmann::json momentum = nlohmann::json::array();
  for (const auto& p : bb.momentum) momentum.push_back(matrix_json(p.cwiseAbs()));
  out["momentum_abs"] = momentum;
  return out;
}

nlohmann::json report_json(const SweepResult& result) {
  nlohmann::json out;
  out["schema"] = 1;
  out["config_hash"] = result.hash;
  out["pass"] = result.pass();
  nlohmann::json reports = nlohmann::json::array();
  for (const auto& r : result.reports) {
    nlohmann::json j;
    j["quantity"] = r.quantity;
    j["eps"] = r.eps;
    j["times"] = r.times;
    j["errors"] = r.errors;
    j["max_error"] = r.max_error;
    j["has_rate"] = r.has_rate;
    if (r.has_rate) {
      j["theoretical_slope"] = r.theoretical_slope;
      j["required_slope"] = r.required_slope;
    }
    j["fitted"] = r.fitted;
    if (r.fitted) j["fit"] = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"residual", r.fit.residual},
                              {"points", r.fit.used}};
    j["monotone"] = r.monotone;
    j["trend_ratio"] = r.trend_ratio;
    j["pass"] = r.pass;
    if (!r.note.empty()) j["note"] = r.note;
    reports.push_back(j);
  }
  out["reports"] = reports;
  return out;
}

void write_report_csv(const std::string& path, const SweepResult& result) {
  std::ofstream os = open_out(path);
  os << "quantity,eps,t,error\n";
  for (const auto& r : result.reports)
    for (std::size_t i = 0; i < r.eps.size(); ++i)
      for (std::size_t t = 0; t < r.errors[i].size(); ++t)
        os << r.quantity << ',' << r.eps[i] << ',' << r.times[t] << ',' << r.errors[i][t] << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os = open_out(path);
  os << text;
}

}  // namespace envkp
