#include "envkp/series.hpp"

#include "envkp/error.hpp"

#include <algorithm>
#include <cmath>

namespace envkp {

namespace {
IntVec negate(IntVec z) {
  for (int& c : z) c = -c;
  return z;
}

std::complex<double> coefficient(const ExternalPotentialSpec& v, const IntVec& j, const IntVec& z) {
  std::complex<double> sum = 0.0;
  for (const auto& t : v.terms)
    if (t.macro == j && t.cell == z) sum += t.c;
  return sum;
}
}  // namespace

Eigen::VectorXd ExternalPotentialSpec::macro_frequency(const LatticeGeometry& geom, const IntVec& j) const {
  return geom.reciprocal_vector(j) / static_cast<double>(box_cells);
}

std::complex<double> ExternalPotentialSpec::value(const LatticeGeometry& geom, const Eigen::VectorXd& x,
                                                  const Eigen::VectorXd& z) const {
  std::complex<double> sum = 0.0;
  for (const auto& t : terms) {
    const double phase = macro_frequency(geom, t.macro).dot(x) + geom.reciprocal_vector(t.cell).dot(z);
    sum += t.c * std::polar(1.0, phase);
  }
  return sum;
}

int ExternalPotentialSpec::max_cell_harmonic() const {
  int h = 0;
  for (const auto& t : terms)
    for (int c : t.cell) h = std::max(h, std::abs(c));
  return h;
}

int ExternalPotentialSpec::max_macro_index() const {
  int h = 0;
  for (const auto& t : terms)
    for (int c : t.macro) h = std::max(h, std::abs(c));
  return h;
}

bool ExternalPotentialSpec::depends_on_cell() const {
  return std::any_of(terms.begin(), terms.end(), [](const SeriesTerm& t) {
    return t.c != 0.0 && std::any_of(t.cell.begin(), t.cell.end(), [](int c) { return c != 0; });
  });
}

std::complex<double> ExternalPotentialSpec::macro_amplitude(const LatticeGeometry& geom, const IntVec& j,
                                                            const Eigen::VectorXd& z) const {
  std::complex<double> sum = 0.0;
  for (const auto& t : terms)
    if (t.macro == j) sum += t.c * std::polar(1.0, geom.reciprocal_vector(t.cell).dot(z));
  return sum;
}

std::vector<IntVec> ExternalPotentialSpec::macro_indices() const {
  std::vector<IntVec> out;
  for (const auto& t : terms)
    if (std::find(out.begin(), out.end(), t.macro) == out.end()) out.push_back(t.macro);
  return out;
}

ExternalPotentialSpec ExternalPotentialSpec::zero(int dim, int box_cells) {
  ExternalPotentialSpec v;
  v.dim = dim;
  v.box_cells = box_cells;
  return v;
}

ExternalPotentialSpec ExternalPotentialSpec::constant(int dim, int box_cells, double c) {
  ExternalPotentialSpec v = zero(dim, box_cells);
  v.terms.push_back({IntVec(dim, 0), IntVec(dim, 0), c});
  return v;
}

double hermitian_defect(const ExternalPotentialSpec& v) {
  double worst = 0.0;
  for (const auto& t : v.terms) {
    const auto a = coefficient(v, t.macro, t.cell);
    const auto b = coefficient(v, negate(t.macro), negate(t.cell));
    worst = std::max(worst, std::abs(b - std::conj(a)));
  }
  return worst;
}

void validate_hermitian(const ExternalPotentialSpec& v, double tol) {
  for (const auto& t : v.terms)
    if (static_cast<int>(t.macro.size()) != v.dim || static_cast<int>(t.cell.size()) != v.dim)
      raise(ErrorKind::ConfigInvalid, "series term has wrong dimension");
  if (v.box_cells < 1) raise(ErrorKind::ConfigInvalid, "box_cells must be positive");
  if (hermitian_defect(v) > tol)
    raise(ErrorKind::ConfigInvalid, "series is not real-valued: c(-j,-z) != conj c(j,z)");
}

}  // namespace envkp
