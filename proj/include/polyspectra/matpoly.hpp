#pragma once

#include <optional>
#include <vector>

#include "polyspectra/common.hpp"

namespace polyspectra {

/// P(λ) = Σ_j P_j λ^j with square complex coefficients, stored lowest degree
/// first. Immutable after construction.
class MatrixPolynomial {
 public:
  explicit MatrixPolynomial(std::vector<CMatrix> coeffs);

  static MatrixPolynomial zero(Index n, int degree);

  Index n() const { return coeffs_.front().rows(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const CMatrix& coeff(int j) const { return coeffs_.at(static_cast<size_t>(j)); }
  const CMatrix& leading() const { return coeffs_.back(); }
  const std::vector<CMatrix>& coeffs() const { return coeffs_; }

 private:
  std::vector<CMatrix> coeffs_;
};

/// w(x) = Σ_j w_j x^j with w_0 > 0 and w_j >= 0. Coefficients past the stored
/// length read as zero, so a weight may be shorter than the polynomial degree.
class WeightPolynomial {
 public:
  explicit WeightPolynomial(std::vector<double> weights);

  static WeightPolynomial unit() { return WeightPolynomial({1.0}); }

  double coeff(int j) const {
    return j >= 0 && j < static_cast<int>(weights_.size()) ? weights_[static_cast<size_t>(j)] : 0.0;
  }
  const std::vector<double>& weights() const { return weights_; }
  int degree() const;

  // True when w_j = 0 for every j >= 1.
  bool is_constant() const { return degree() == 0; }

 private:
  std::vector<double> weights_;
};

struct EigenReport {
  std::vector<Complex> eigenvalues;
  std::vector<int> multiplicities;  // algebraic
  double cluster_radius = 0.0;

  int total_multiplicity() const;
  int distinct() const { return static_cast<int>(eigenvalues.size()); }
};

/// Σ_j P_j λ^j by Horner recurrence.
CMatrix evaluate(const MatrixPolynomial& p, Complex lambda);

/// P'(λ) evaluated directly, without materialising the derivative polynomial.
CMatrix evaluate_derivative(const MatrixPolynomial& p, Complex lambda);

MatrixPolynomial derivative(const MatrixPolynomial& p);

double spectral_norm(const CMatrix& a);

/// max_j ‖P_j‖ in the spectral norm.
double max_norm(const MatrixPolynomial& p);

/// Σ_j ‖P_j‖ |λ|^j, an upper bound for ‖P(λ)‖ used to scale tolerances.
double evaluation_scale(const MatrixPolynomial& p, Complex lambda);

double weight_eval(const WeightPolynomial& w, double r);
double weight_derivative_eval(const WeightPolynomial& w, double r);

/// n · machine-epsilon · ‖P_m‖.
double singular_leading_threshold(const MatrixPolynomial& p);
bool has_nonsingular_leading(const MatrixPolynomial& p);

double default_cluster_radius(const std::vector<Complex>& raw);

/// Roots of det P(λ) from the first companion form of the monic polynomial
/// P_m^{-1} P(λ). Numerically coincident roots within 2·cluster_radius are
/// merged into one eigenvalue carrying the summed multiplicity.
EigenReport eigenvalues(const MatrixPolynomial& p, std::optional<double> cluster_radius = {});

/// Number of singular values of P(λ₀) at or below tol · evaluation_scale.
int geometric_multiplicity(const MatrixPolynomial& p, Complex lambda0, double tol);

}  // namespace polyspectra
