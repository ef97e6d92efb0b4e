#pragma once

#include "polyspectra/matpoly.hpp"

namespace polyspectra {

/// Full SVD of P(λ): values descending, columns of `left`/`right` hold u_j, v_j
/// with P(λ) v_j = s_j u_j. Each pair is rotated so the largest-modulus entry
/// of v_j is real and positive.
struct SingularTripletSet {
  Eigen::VectorXd values;
  CMatrix left;
  CMatrix right;

  Index size() const { return values.size(); }
  double smallest() const { return values(values.size() - 1); }
};

struct GradientValue {
  double dx = 0.0;
  double dy = 0.0;
  double gap = 0.0;  // s_{n-1} - s_n, +inf when n = 1
  bool valid = false;

  double norm() const { return std::hypot(dx, dy); }
};

// Smoothness thresholds; the first two scale with s_1(λ).
inline double gap_tolerance(double s1) { return 1e-8 * s1; }
inline double zero_tolerance(double s1) { return 1e-12 * (1.0 + s1); }
inline constexpr double kOriginTolerance = 1e-12;

SingularTripletSet singular_triplets(const CMatrix& a);
SingularTripletSet singular_triplets(const MatrixPolynomial& p, Complex lambda);

/// Singular values only (descending); cheaper than the triplets.
Eigen::VectorXd singular_values(const MatrixPolynomial& p, Complex lambda);

double s_min(const MatrixPolynomial& p, Complex lambda);

/// s_n(λ) - ε·w(|λ|). Non-positive exactly on the ε-pseudospectrum.
double f_eps(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda);

/// ∇s_n = (Re u*P'v, Re u*(iP')v) from the singular pair of s_n.
GradientValue grad_s_min(const MatrixPolynomial& p, Complex lambda);

/// ∇F_ε = ∇s_n - ε·w'(|λ|)·λ/|λ|. Invalid at the origin when w has a linear
/// term, since w(|λ|) has a corner there.
GradientValue grad_f(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda);

/// Raw s_{n-1}(λ) - s_n(λ); requires n >= 2.
double gap(const MatrixPolynomial& p, Complex lambda);

}  // namespace polyspectra
