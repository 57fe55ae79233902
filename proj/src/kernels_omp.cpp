#include "kernels_impl.hpp"

namespace envkp::kernels::omp {

void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g) {
  detail::check_blocks(blocks, g);
  const long cols = g.cols();
#pragma omp parallel for schedule(static)
  for (long j = 0; j < cols; ++j) detail::block_column(blocks[j], g, j);
}

void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g) {
  const long cols = g.cols();
#pragma omp parallel for schedule(static)
  for (long j = 0; j < cols; ++j)
    for (Eigen::Index n = 0; n < g.rows(); ++n) g(n, j) *= factors(n, j);
}

void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v) {
  const long size = v.size();
#pragma omp parallel for schedule(static)
  for (long s = 0; s < size; ++s) v[s] *= factors[s];
}

void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out) {
  detail::check_table(coeffs, table, out.cols());
  const long cols = out.cols();
#pragma omp parallel for schedule(static)
  for (long r = 0; r < cols; ++r) detail::gather_column(coeffs, table, spectrum, out, r);
}

void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum) {
  detail::check_table(coeffs, table, g.cols());
  const long cols = g.cols();
#pragma omp parallel for schedule(static)
  for (long r = 0; r < cols; ++r) detail::scatter_column(coeffs, table, g, spectrum, r);
}

void hermitian_exponentials(const Blocks& h, double tau, Blocks& out) {
  out.resize(h.size());
  const long count = static_cast<long>(h.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long j = 0; j < count; ++j) out[j] = hermitian_exponential(h[j], tau);
}

}  // namespace envkp::kernels::omp
