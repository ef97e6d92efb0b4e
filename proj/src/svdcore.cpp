#include "polyspectra/svdcore.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace polyspectra {

SingularTripletSet singular_triplets(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SingularTripletSet out{svd.singularValues(), svd.matrixU(), svd.matrixV()};
  for (Index j = 0; j < out.right.cols(); ++j) {
    Index pivot = 0;
    out.right.col(j).cwiseAbs().maxCoeff(&pivot);
    const Complex entry = out.right(pivot, j);
    if (std::abs(entry) == 0.0) continue;
    const Complex phase = std::conj(entry) / std::abs(entry);
    out.right.col(j) *= phase;
    out.left.col(j) *= phase;
  }
  return out;
}

SingularTripletSet singular_triplets(const MatrixPolynomial& p, Complex lambda) {
  return singular_triplets(evaluate(p, lambda));
}

Eigen::VectorXd singular_values(const MatrixPolynomial& p, Complex lambda) {
  Eigen::JacobiSVD<CMatrix> svd(evaluate(p, lambda));
  return svd.singularValues();
}

double s_min(const MatrixPolynomial& p, Complex lambda) {
  const Eigen::VectorXd s = singular_values(p, lambda);
  return s(s.size() - 1);
}

double f_eps(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda) {
  if (!(eps >= 0.0)) throw_precondition("epsilon must be non-negative");
  return s_min(p, lambda) - eps * weight_eval(w, std::abs(lambda));
}

GradientValue grad_s_min(const MatrixPolynomial& p, Complex lambda) {
  const SingularTripletSet t = singular_triplets(p, lambda);
  const Index n = t.size();
  const double s1 = t.values(0);
  const double sn = t.values(n - 1);

  GradientValue g;
  g.gap = n >= 2 ? t.values(n - 2) - sn : std::numeric_limits<double>::infinity();
  const Complex z = t.left.col(n - 1).dot(evaluate_derivative(p, lambda) * t.right.col(n - 1));
  // Re(u* (iP') v) = -Im(u* P' v)
  g.dx = z.real();
  g.dy = -z.imag();
  g.valid = g.gap > gap_tolerance(s1) && sn > zero_tolerance(s1);
  return g;
}

GradientValue grad_f(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda) {
  if (!(eps >= 0.0)) throw_precondition("epsilon must be non-negative");
  GradientValue g = grad_s_min(p, lambda);
  const double r = std::abs(lambda);
  if (r < kOriginTolerance) {
    // w(|λ|) is differentiable at 0 only without a linear term; its gradient is then zero.
    if (eps > 0.0 && w.coeff(1) > 0.0) g.valid = false;
    return g;
  }
  const double slope = eps * weight_derivative_eval(w, r);
  g.dx -= slope * lambda.real() / r;
  g.dy -= slope * lambda.imag() / r;
  return g;
}

double gap(const MatrixPolynomial& p, Complex lambda) {
  if (p.n() < 2) throw_precondition("gap needs at least two singular values (n >= 2)");
  const Eigen::VectorXd s = singular_values(p, lambda);
  return s(s.size() - 2) - s(s.size() - 1);
}

}  // namespace polyspectra
