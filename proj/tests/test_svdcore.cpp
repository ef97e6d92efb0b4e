#include <doctest.h>

#include "oracles.hpp"

using namespace polyspectra;

TEST_CASE("singular values at the saddle of the double-eigenvalue quadratic") {
  const auto [p, w] = oracle::load("example6.json");
  const Eigen::VectorXd s = singular_values(p, 1.4145);
  // reference values from an independent LAPACK run
  CHECK(s(0) == doctest::Approx(1.46500224).epsilon(1e-8));
  CHECK(s(1) == doctest::Approx(0.04020357).epsilon(1e-7));
  CHECK(std::abs(s(0) - 1.4650) < 5e-4);
  CHECK(std::abs(s(1) - 0.0402) < 5e-4);
}

TEST_CASE("singular values agree with the Hermitian dilation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixPolynomial p = oracle::random_polynomial(rng, 1 + trial % 4, 1 + trial % 2);
    const Complex z = oracle::random_point(rng, 2.0);
    const Eigen::VectorXd ref = oracle::singular_values(oracle::power_sum(p, z));
    const Eigen::VectorXd s = singular_values(p, z);
    CHECK((s - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + ref(0)));
    CHECK(s_min(p, z) == s(s.size() - 1));
  }
}

TEST_CASE("triplets satisfy P v = s u with unit vectors and a fixed phase") {
  std::mt19937_64 rng(22);
  const MatrixPolynomial p = oracle::random_polynomial(rng, 3, 2);
  const Complex z(0.3, -0.7);
  const SingularTripletSet t = singular_triplets(p, z);
  const CMatrix a = oracle::power_sum(p, z);
  for (Index j = 0; j < t.size(); ++j) {
    CHECK((a * t.right.col(j) - t.values(j) * t.left.col(j)).norm() <= 1e-12 * t.values(0));
    CHECK(t.right.col(j).norm() == doctest::Approx(1.0));
    CHECK(t.left.col(j).norm() == doctest::Approx(1.0));
    Index pivot = 0;
    t.right.col(j).cwiseAbs().maxCoeff(&pivot);
    CHECK(std::abs(t.right(pivot, j).imag()) < 1e-14);
    CHECK(t.right(pivot, j).real() > 0.0);
  }
}

TEST_CASE("scalar polynomial: s_n is the distance to the root") {
  const MatrixPolynomial p({CMatrix::Constant(1, 1, Complex(-0.5, -0.25)), CMatrix::Identity(1, 1)});
  const Complex z(2.0, 1.0);
  CHECK(s_min(p, z) == doctest::Approx(std::abs(z - Complex(0.5, 0.25))));
  const GradientValue g = grad_s_min(p, z);
  const Complex unit = (z - Complex(0.5, 0.25)) / std::abs(z - Complex(0.5, 0.25));
  CHECK(g.valid);
  CHECK(g.dx == doctest::Approx(unit.real()));
  CHECK(g.dy == doctest::Approx(unit.imag()));
  CHECK(std::isinf(g.gap));
  CHECK_THROWS_AS(gap(p, z), Error);
}

TEST_CASE("gradient of F_eps includes the weight term") {
  std::mt19937_64 rng(23);
  const MatrixPolynomial p = oracle::random_polynomial(rng, 2, 2);
  const WeightPolynomial w({1.0, 0.5, 0.25});
  const double eps = 0.3;
  const Complex z(0.7, 1.1);
  const GradientValue g = grad_f(p, w, eps, z);
  auto f = [&](Complex q) { return oracle::s_min(p, q) - eps * oracle::weight(w, std::abs(q)); };
  const Complex fd = oracle::fd_gradient(f, z, 1e-6);
  REQUIRE(g.valid);
  CHECK(std::abs(Complex(g.dx, g.dy) - fd) < 1e-6);
  CHECK(f_eps(p, w, eps, z) == doctest::Approx(f(z)).epsilon(1e-12));
  CHECK_THROWS_AS(f_eps(p, w, -1.0, z), Error);
}

TEST_CASE("gradient is invalid on the spectrum, at crossings and at a weight corner") {
  const auto [p, w] = oracle::load("conic_pencil.json");
  const Eigen::VectorXd s = singular_values(p, 0.0);
  CHECK(std::abs(s(1) - std::sqrt(5.0 / 16.0)) < 1e-10);
  CHECK(std::abs(s(2) - std::sqrt(5.0 / 16.0)) < 1e-10);
  CHECK_FALSE(grad_s_min(p, 0.0).valid);
  CHECK(gap(p, 0.0) < 1e-10);

  const auto [q, unit] = oracle::load("diag_pm1.json");
  CHECK_FALSE(grad_s_min(q, 1.0).valid);
  CHECK(grad_s_min(q, Complex(0.5, 0.5)).valid);
  // equal moduli on the imaginary axis
  CHECK_FALSE(grad_s_min(q, Complex(0.0, 0.5)).valid);

  const WeightPolynomial linear({1.0, 1.0});
  CHECK_FALSE(grad_f(q, linear, 0.5, 0.0).valid);
  CHECK(grad_f(q, WeightPolynomial({1.0, 0.0, 1.0}), 0.5, Complex(0.3, 0.5)).valid);
  CHECK(grad_f(q, linear, 0.0, Complex(0.3, 0.5)).valid);
}
