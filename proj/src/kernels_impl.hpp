#pragma once

// Per-item bodies shared by the serial and OpenMP kernels so both produce identical bits.

#include "envkp/error.hpp"
#include "envkp/kernels.hpp"

namespace envkp::kernels::detail {

inline void block_column(const Eigen::MatrixXcd& block, Eigen::MatrixXcd& g, Eigen::Index j) {
  const Eigen::VectorXcd col = g.col(j);
  g.col(j).noalias() = block * col;
}

inline void gather_column(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                          Eigen::MatrixXcd& out, Eigen::Index r) {
  const Eigen::Index nb = coeffs.rows();
  const Eigen::Index q = coeffs.cols();
  const long* row = table.data() + r * q;
  for (Eigen::Index n = 0; n < nb; ++n) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index b = 0; b < q; ++b) acc += std::conj(coeffs(n, b)) * spectrum[row[b]];
    out(n, r) = acc;
  }
}

inline void scatter_column(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                           Eigen::VectorXcd& spectrum, Eigen::Index r) {
  const Eigen::Index nb = coeffs.rows();
  const Eigen::Index q = coeffs.cols();
  const long* row = table.data() + r * q;
  for (Eigen::Index b = 0; b < q; ++b) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index n = 0; n < nb; ++n) acc += coeffs(n, b) * g(n, r);
    spectrum[row[b]] = acc;
  }
}

inline void check_blocks(const Blocks& blocks, const Eigen::MatrixXcd& g) {
  if (static_cast<Eigen::Index>(blocks.size()) != g.cols()) raise(ErrorKind::GridMismatch, "block count mismatch");
}

inline void check_table(const Eigen::MatrixXcd& coeffs, const Table& table, Eigen::Index columns) {
  if (static_cast<Eigen::Index>(table.size()) != coeffs.cols() * columns)
    raise(ErrorKind::GridMismatch, "band table size does not match coefficients and columns");
}

}  // namespace envkp::kernels::detail
