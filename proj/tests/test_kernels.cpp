#include "envkp/error.hpp"
#include "envkp/kernels.hpp"

#include "doctest.h"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <numeric>
#include <random>

using namespace envkp;
using cd = std::complex<double>;

namespace {

struct Data {
  kernels::Blocks blocks, hermitian;
  Eigen::MatrixXcd g, factors, coeffs;
  Eigen::VectorXcd v, vfactors, spectrum;
  kernels::Table table;
};

Data make_data(int nb, long cols, int q) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n;
  auto rnd = [&](long r, long c) {
    Eigen::MatrixXcd m(r, c);
    for (long i = 0; i < m.size(); ++i) m.data()[i] = cd(n(rng), n(rng));
    return m;
  };
  Data d;
  for (long j = 0; j < cols; ++j) {
    d.blocks.push_back(rnd(nb, nb));
    const Eigen::MatrixXcd a = rnd(nb, nb);
    d.hermitian.push_back(0.5 * (a + a.adjoint()));
  }
  d.g = rnd(nb, cols);
  d.factors = rnd(nb, cols);
  d.coeffs = rnd(nb, q);
  d.v = rnd(cols * q + 7, 1);
  d.vfactors = rnd(cols * q + 7, 1);
  d.spectrum = rnd(cols * q + 7, 1);
  d.table.resize(cols * q);
  std::iota(d.table.begin(), d.table.end(), 3L);
  std::shuffle(d.table.begin(), d.table.end(), rng);
  return d;
}

}  // namespace

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  kernels::set_threads(4);
  const Data d = make_data(5, 301, 7);

  Eigen::MatrixXcd a = d.g, b = d.g;
  kernels::serial::block_matvec(d.blocks, a);
  kernels::omp::block_matvec(d.blocks, b);
  CHECK(a == b);
  CHECK((a.col(10) - d.blocks[10] * d.g.col(10)).cwiseAbs().maxCoeff() < 1e-13);

  a = d.g;
  b = d.g;
  kernels::serial::scale_elements(d.factors, a);
  kernels::omp::scale_elements(d.factors, b);
  CHECK(a == b);
  CHECK(a(2, 7) == d.g(2, 7) * d.factors(2, 7));

  Eigen::VectorXcd va = d.v, vb = d.v;
  kernels::serial::scale_pointwise(d.vfactors, va);
  kernels::omp::scale_pointwise(d.vfactors, vb);
  CHECK(va == vb);

  Eigen::MatrixXcd ga(5, 301), gb(5, 301);
  kernels::serial::gather_bands(d.coeffs, d.table, d.spectrum, ga);
  kernels::omp::gather_bands(d.coeffs, d.table, d.spectrum, gb);
  CHECK(ga == gb);
  cd want = 0.0;
  for (int q = 0; q < 7; ++q) want += std::conj(d.coeffs(3, q)) * d.spectrum[d.table[20 * 7 + q]];
  CHECK(std::abs(ga(3, 20) - want) < 1e-13);

  Eigen::VectorXcd sa = Eigen::VectorXcd::Zero(d.spectrum.size()), sb = sa;
  kernels::serial::scatter_bands(d.coeffs, d.table, d.g, sa);
  kernels::omp::scatter_bands(d.coeffs, d.table, d.g, sb);
  CHECK(sa == sb);
  CHECK(std::abs((d.coeffs.col(4).transpose() * d.g.col(9))(0, 0) - sa[d.table[9 * 7 + 4]]) < 1e-13);

  kernels::Blocks ea, eb;
  kernels::serial::hermitian_exponentials(d.hermitian, 0.7, ea);
  kernels::omp::hermitian_exponentials(d.hermitian, 0.7, eb);
  REQUIRE(ea.size() == eb.size());
  for (std::size_t j = 0; j < ea.size(); ++j) CHECK(ea[j] == eb[j]);
}

TEST_CASE("Hermitian exponential matches the matrix exponential") {
  const Data d = make_data(4, 3, 2);
  for (const auto& h : d.hermitian) {
    const Eigen::MatrixXcd want = (cd(0.0, -0.4) * h).exp();
    const Eigen::MatrixXcd got = kernels::hermitian_exponential(h, 0.4);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((got * got.adjoint() - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("dispatch follows the policy") {
  const Data d = make_data(3, 40, 2);
  kernels::set_policy(kernels::Policy::OpenMP);
  CHECK(kernels::policy() == kernels::Policy::OpenMP);
  Eigen::MatrixXcd a = d.g, b = d.g;
  kernels::block_matvec(d.blocks, a);
  kernels::set_policy(kernels::Policy::Serial);
  kernels::block_matvec(d.blocks, b);
  CHECK(a == b);
  CHECK(kernels::max_threads() >= 1);
}

TEST_CASE("shape mismatches are reported") {
  const Data d = make_data(3, 40, 2);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(3, 41);
  CHECK_THROWS_AS(kernels::serial::block_matvec(d.blocks, g), Error);
  CHECK_THROWS_AS(kernels::omp::block_matvec(d.blocks, g), Error);
  kernels::Table bad = d.table;
  bad.pop_back();
  Eigen::MatrixXcd out(3, 40);
  CHECK_THROWS_AS(kernels::serial::gather_bands(d.coeffs, bad, d.spectrum, out), Error);
}
