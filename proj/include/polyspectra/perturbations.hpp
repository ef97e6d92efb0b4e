#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyspectra/faultlines.hpp"

namespace polyspectra {

/// Coefficient perturbations Δ_0 … Δ_m of a base polynomial, together with
/// how they were built.
struct PerturbationSet {
  std::vector<CMatrix> deltas;
  MatrixPolynomial base;
  int k = 1;                  // multiplicity of s_n(μ) used by the construction
  double delta = 0.0;         // s_n(μ)/w(|μ|)
  CMatrix z;                  // Ẑ (unitary) or Z̃ (rank k)
  bool constant_weight = false;  // μ = 0 with a non-constant weight, so w_c(x) = w_0 was used

  /// Q(λ) = Σ (P_j + Δ_j) λ^j.
  MatrixPolynomial perturbed() const;
};

enum class Rank { kFull, kLow };

// Cluster width for the multiplicity of s_n and the defect threshold.
inline double multiplicity_tolerance(double s1) { return 1e-8 * s1; }
double defect_tolerance(const MatrixPolynomial& p, Complex mu);

/// Q̂ = P + Δ̂ with Ẑ = U V^*; every Δ̂_j is a multiple of Ê = -s_n(μ) Ẑ.
PerturbationSet build_qhat(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu);
/// Q̃ uses only the k trailing singular pairs, so each Δ̃_j has rank k.
PerturbationSet build_qtilde(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu);
/// Same constructions from caller-supplied triplets of P(μ).
PerturbationSet build_from_triplets(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu,
                                    const SingularTripletSet& triplets, Rank rank);

enum class Membership { kInterior, kBoundary, kOutside };
const char* to_string(Membership m);

struct BallMembership {
  double radius = 0.0;  // +inf when some Δ_j != 0 has w_j = 0
  Membership classification = Membership::kInterior;
};

/// Relative tolerance for radius = ε, as a fraction of ε.
inline constexpr double kBallTolerance = 1e-9;

BallMembership ball_membership(const std::vector<CMatrix>& deltas, const WeightPolynomial& w, double eps,
                               double rel_tol = kBallTolerance);
inline BallMembership ball_membership(const PerturbationSet& set, const WeightPolynomial& w, double eps,
                                      double rel_tol = kBallTolerance) {
  return ball_membership(set.deltas, w, eps, rel_tol);
}

struct EigenDistance {
  double delta = 0.0;
  bool on_spectrum = false;  // μ is numerically an eigenvalue; delta is 0 by convention
};

EigenDistance distance_to_eigenvalue(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu);

/// u^* P'(μ) v for unit u, v.
Complex multiple_criterion(const MatrixPolynomial& p, Complex mu, const CVector& u, const CVector& v);

enum class SaddleError { kLeftWindow, kConvergedToEigenvalue, kFaultPoint, kNotConverged, kOriginSingularity };
const char* to_string(SaddleError e);

class SaddleFailure : public Error {
 public:
  SaddleFailure(SaddleError code, const std::string& what, Complex where)
      : Error(ErrorKind::kNumerical, what), code_(code), where_(where) {}
  SaddleError code() const noexcept { return code_; }
  Complex where() const noexcept { return where_; }

 private:
  SaddleError code_;
  Complex where_;
};

struct SaddleOptions {
  std::optional<Complex> crossing;  // direction joining the two merging components, if known
  int newton_iterations = 50;
};

struct SaddleResult {
  Complex mu;
  double delta = 0.0;      // s_n(μ)/w(|μ|)
  double grad_norm = 0.0;  // ‖∇F_δ(μ)‖; NaN at a fault point
  bool on_fault = false;   // the two lowest surfaces meet at μ
  bool ridge_search = false;
};

/// Stationary point of s_n(λ)/w(|λ|) near start. Newton on the stationarity
/// condition first; where that stalls (fault points, flat Jacobians) a
/// minimax search over the ridge separating the two components.
SaddleResult find_saddle(const MatrixPolynomial& p, const WeightPolynomial& w, Complex start, const Window& window,
                         const SaddleOptions& options = {});

struct MultiplicityCertificate {
  Complex mu;
  PerturbationSet q_hat;
  PerturbationSet q_tilde;
  double delta = 0.0;
  int geometric_mult = 1;       // k from the singular-value cluster of P(μ)
  int geometric_mult_qhat = 1;  // nullity of Q̂(μ)
  bool multiple = false;
  bool defective = false;
  Complex criterion{};  // u_n^* Q̂'(μ) v_n
  double residual = 0.0;        // s_min(Q̂(μ))
  double residual_tilde = 0.0;  // s_min(Q̃(μ))
  bool constant_weight = false;
};

MultiplicityCertificate certify_multiple(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu);

struct DistanceOptions {
  std::optional<Window> window;
  int nx = 401;
  int ny = 401;
  unsigned threads = 0;
};

struct DistanceResult {
  double r = 0.0;
  double grid_lo = 0.0;  // largest ε seen without a merge on the grid
  double grid_hi = 0.0;  // smallest ε seen with a merge on the grid
  Window window;
  std::pair<Complex, Complex> pair;  // the merging eigenvalues
  std::optional<SaddleResult> saddle;
  std::optional<MultiplicityCertificate> certificate;
  std::optional<double> connected_epsilon;  // first ε at which all eigenvalues share one component
  bool bounded = true;                      // boundedness_check(P, w, ε_max)
  bool origin_case = false;
  std::vector<std::string> warnings;
};

/// r(P): first ε at which two eigenvalues share a pseudospectrum component,
/// sharpened by a saddle search between the merging pair.
DistanceResult distance_to_multiple(const MatrixPolynomial& p, const WeightPolynomial& w, double eps_max,
                                    const DistanceOptions& options = {});

}  // namespace polyspectra
