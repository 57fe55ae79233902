#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in kernels::serial and an
// OpenMP version in kernels::omp with identical signatures and bitwise-identical results;
// the unqualified functions dispatch on the process-wide policy.

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace envkp::kernels {

enum class Policy { Serial, OpenMP };

void set_policy(Policy p);
Policy policy();
/// Sets the OpenMP team size; values < 1 leave the runtime default.
void set_threads(int n);
int max_threads();

using Blocks = std::vector<Eigen::MatrixXcd>;
using Table = std::vector<long>;

namespace serial {
void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g);
void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g);
void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v);
void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out);
void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum);
void hermitian_exponentials(const Blocks& h, double tau, Blocks& out);
}  // namespace serial

namespace omp {
void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g);
void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g);
void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v);
void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out);
void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum);
void hermitian_exponentials(const Blocks& h, double tau, Blocks& out);
}  // namespace omp

/// g.col(j) <- blocks[j] * g.col(j)
void block_matvec(const Blocks& blocks, Eigen::MatrixXcd& g);
/// g <- g .* factors
void scale_elements(const Eigen::MatrixXcd& factors, Eigen::MatrixXcd& g);
/// v <- v .* factors
void scale_pointwise(const Eigen::VectorXcd& factors, Eigen::VectorXcd& v);
/// out(n, r) = sum_b conj(coeffs(n, b)) * spectrum[table[r * Q + b]], Q = coeffs.cols()
void gather_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::VectorXcd& spectrum,
                  Eigen::MatrixXcd& out);
/// spectrum[table[r * Q + b]] = sum_n coeffs(n, b) * g(n, r); other entries are left untouched
void scatter_bands(const Eigen::MatrixXcd& coeffs, const Table& table, const Eigen::MatrixXcd& g,
                   Eigen::VectorXcd& spectrum);
/// out[j] = exp(-i tau h[j]) for Hermitian h[j]
void hermitian_exponentials(const Blocks& h, double tau, Blocks& out);

/// exp(-i tau h) for one Hermitian matrix.
Eigen::MatrixXcd hermitian_exponential(const Eigen::MatrixXcd& h, double tau);

}  // namespace envkp::kernels
