#include "kernels_impl.hpp"

namespace envkp::kernels::serial {

void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g) {
  detail::check_blocks(blocks, g);
  for (Eigen::Index j = 0; j < g.cols(); ++j) detail::block_column(blocks[j], g, j);
}

void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g) {
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index n = 0; n < g.rows(); ++n) g(n, j) *= factors(n, j);
}

void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v) {
  for (Eigen::Index s = 0; s < v.size(); ++s) v[s] *= factors[s];
}

void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out) {
  detail::check_table(coeffs, table, out.cols());
  for (Eigen::Index r = 0; r < out.cols(); ++r) detail::gather_column(coeffs, table, spectrum, out, r);
}

void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum) {
  detail::check_table(coeffs, table, g.cols());
  for (Eigen::Index r = 0; r < g.cols(); ++r) detail::scatter_column(coeffs, table, g, spectrum, r);
}

void hermitian_exponentials(const Blocks& h, double tau, Blocks& out) {
  out.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) out[j] = hermitian_exponential(h[j], tau);
}

}  // namespace envkp::kernels::serial
