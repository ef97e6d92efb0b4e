#include "polyspectra/matpoly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polyspectra {

MatrixPolynomial::MatrixPolynomial(std::vector<CMatrix> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw_precondition("matrix polynomial needs at least one coefficient");
  const Index n = coeffs_.front().rows();
  if (n <= 0) throw_precondition("matrix polynomial dimension must be positive");
  for (size_t j = 0; j < coeffs_.size(); ++j) {
    if (coeffs_[j].rows() != n || coeffs_[j].cols() != n) {
      throw_precondition("coefficient " + std::to_string(j) + " is not " + std::to_string(n) + "x" +
                         std::to_string(n));
    }
  }
}

MatrixPolynomial MatrixPolynomial::zero(Index n, int degree) {
  return MatrixPolynomial(std::vector<CMatrix>(static_cast<size_t>(degree + 1), CMatrix::Zero(n, n)));
}

WeightPolynomial::WeightPolynomial(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw_precondition("weight polynomial needs a constant coefficient");
  if (!(weights_.front() > 0.0)) throw_precondition("weight w_0 must be strictly positive");
  for (double wj : weights_) {
    if (!(wj >= 0.0) || !std::isfinite(wj)) throw_precondition("weights must be finite and non-negative");
  }
}

int WeightPolynomial::degree() const {
  int d = 0;
  for (size_t j = 0; j < weights_.size(); ++j) {
    if (weights_[j] > 0.0) d = static_cast<int>(j);
  }
  return d;
}

int EigenReport::total_multiplicity() const {
  return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

CMatrix evaluate(const MatrixPolynomial& p, Complex lambda) {
  CMatrix acc = p.leading();
  for (int j = p.degree() - 1; j >= 0; --j) {
    acc *= lambda;
    acc += p.coeff(j);
  }
  return acc;
}

CMatrix evaluate_derivative(const MatrixPolynomial& p, Complex lambda) {
  const int m = p.degree();
  if (m == 0) return CMatrix::Zero(p.n(), p.n());
  CMatrix acc = static_cast<double>(m) * p.leading();
  for (int j = m - 1; j >= 1; --j) {
    acc *= lambda;
    acc += static_cast<double>(j) * p.coeff(j);
  }
  return acc;
}

MatrixPolynomial derivative(const MatrixPolynomial& p) {
  const int m = p.degree();
  if (m == 0) return MatrixPolynomial::zero(p.n(), 0);
  std::vector<CMatrix> out;
  out.reserve(static_cast<size_t>(m));
  for (int j = 1; j <= m; ++j) out.push_back(static_cast<double>(j) * p.coeff(j));
  return MatrixPolynomial(std::move(out));
}

double spectral_norm(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

double max_norm(const MatrixPolynomial& p) {
  double best = 0.0;
  for (const auto& c : p.coeffs()) best = std::max(best, spectral_norm(c));
  return best;
}

double evaluation_scale(const MatrixPolynomial& p, Complex lambda) {
  const double r = std::abs(lambda);
  double acc = 0.0;
  for (int j = p.degree(); j >= 0; --j) acc = acc * r + spectral_norm(p.coeff(j));
  return acc;
}

double weight_eval(const WeightPolynomial& w, double r) {
  if (!(r >= 0.0)) throw_precondition("weight polynomial is evaluated at |λ| >= 0 only");
  const auto& c = w.weights();
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
  return acc;
}

double weight_derivative_eval(const WeightPolynomial& w, double r) {
  if (!(r >= 0.0)) throw_precondition("weight polynomial is evaluated at |λ| >= 0 only");
  const auto& c = w.weights();
  double acc = 0.0;
  for (size_t j = c.size(); j-- > 1;) acc = acc * r + static_cast<double>(j) * c[j];
  return acc;
}

double singular_leading_threshold(const MatrixPolynomial& p) {
  return static_cast<double>(p.n()) * std::numeric_limits<double>::epsilon() * spectral_norm(p.leading());
}

bool has_nonsingular_leading(const MatrixPolynomial& p) {
  Eigen::JacobiSVD<CMatrix> svd(p.leading());
  const double smallest = svd.singularValues()(p.n() - 1);
  return smallest > singular_leading_threshold(p);
}

double default_cluster_radius(const std::vector<Complex>& raw) {
  double largest = 0.0;
  for (auto z : raw) largest = std::max(largest, std::abs(z));
  return 1e-6 * (1.0 + largest);
}

namespace {

// Single-linkage grouping of raw roots, repeated on centroids until every pair
// of clusters is separated by more than 2·radius.
void cluster_roots(const std::vector<Complex>& raw, double radius, EigenReport& out) {
  struct Cluster {
    Complex sum;
    int count;
    Complex centre() const { return sum / static_cast<double>(count); }
  };
  std::vector<Cluster> clusters;
  clusters.reserve(raw.size());
  for (auto z : raw) clusters.push_back({z, 1});

  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t a = 0; a < clusters.size() && !merged; ++a) {
      for (size_t b = a + 1; b < clusters.size(); ++b) {
        if (std::abs(clusters[a].centre() - clusters[b].centre()) <= 2.0 * radius) {
          clusters[a].sum += clusters[b].sum;
          clusters[a].count += clusters[b].count;
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
          break;
        }
      }
    }
  }

  std::sort(clusters.begin(), clusters.end(), [](const Cluster& x, const Cluster& y) {
    const Complex cx = x.centre();
    const Complex cy = y.centre();
    if (cx.real() != cy.real()) return cx.real() < cy.real();
    return cx.imag() < cy.imag();
  });
  for (const auto& c : clusters) {
    out.eigenvalues.push_back(c.centre());
    out.multiplicities.push_back(c.count);
  }
}

}  // namespace

EigenReport eigenvalues(const MatrixPolynomial& p, std::optional<double> cluster_radius) {
  if (!has_nonsingular_leading(p)) {
    throw_numerical("leading coefficient is singular; the finite eigenvalue count would drop below n*m");
  }
  const Index n = p.n();
  const int m = p.degree();
  EigenReport report;
  if (m == 0) {
    report.cluster_radius = cluster_radius.value_or(default_cluster_radius({}));
    return report;
  }

  const Eigen::PartialPivLU<CMatrix> lead(p.leading());
  const Index size = n * m;
  CMatrix companion = CMatrix::Zero(size, size);
  for (int block = 0; block + 1 < m; ++block) {
    companion.block(block * n, (block + 1) * n, n, n) = CMatrix::Identity(n, n);
  }
  for (int j = 0; j < m; ++j) {
    companion.block((m - 1) * n, j * n, n, n) = -lead.solve(p.coeff(j));
  }

  Eigen::ComplexEigenSolver<CMatrix> solver(companion, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw_numerical("companion eigenvalue iteration did not converge");

  std::vector<Complex> raw(solver.eigenvalues().data(), solver.eigenvalues().data() + size);
  report.cluster_radius = cluster_radius.value_or(default_cluster_radius(raw));
  cluster_roots(raw, report.cluster_radius, report);
  return report;
}

int geometric_multiplicity(const MatrixPolynomial& p, Complex lambda0, double tol) {
  if (!(tol > 0.0)) throw_precondition("geometric multiplicity tolerance must be positive");
  Eigen::JacobiSVD<CMatrix> svd(evaluate(p, lambda0));
  const double cutoff = tol * evaluation_scale(p, lambda0);
  int k = 0;
  for (Index j = 0; j < svd.singularValues().size(); ++j) {
    if (svd.singularValues()(j) <= cutoff) ++k;
  }
  return k;
}

}  // namespace polyspectra
