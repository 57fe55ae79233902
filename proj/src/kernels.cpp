#include "envkp/kernels.hpp"

#include <omp.h>

#include <atomic>

namespace envkp::kernels {

namespace {
std::atomic<Policy> g_policy{Policy::OpenMP};
}

void set_policy(Policy p) { g_policy.store(p); }
Policy policy() { return g_policy.load(); }

void set_threads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

Eigen::MatrixXcd hermitian_exponential(const Eigen::MatrixXcd& h, double tau) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases[i] = std::polar(1.0, -tau * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g) {
  policy() == Policy::OpenMP ? omp::block_matvec(blocks, g) : serial::block_matvec(blocks, g);
}

void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g) {
  policy() == Policy::OpenMP ? omp::scale_elements(factors, g) : serial::scale_elements(factors, g);
}

void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v) {
  policy() == Policy::OpenMP ? omp::scale_pointwise(factors, v) : serial::scale_pointwise(factors, v);
}

void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out) {
  policy() == Policy::OpenMP ? omp::gather_bands(coeffs, table, spectrum, out)
                             : serial::gather_bands(coeffs, table, spectrum, out);
}

void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum) {
  policy() == Policy::OpenMP ? omp::scatter_bands(coeffs, table, g, spectrum)
                             : serial::scatter_bands(coeffs, table, g, spectrum);
}

void hermitian_exponentials(const Blocks& h, double tau, Blocks& out) {
  policy() == Policy::OpenMP ? omp::hermitian_exponentials(h, tau, out)
                             : serial::hermitian_exponentials(h, tau, out);
}

}  // namespace envkp::kernels
