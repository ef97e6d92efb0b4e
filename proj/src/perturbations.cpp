#include "polyspectra/perturbations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace polyspectra {

MatrixPolynomial PerturbationSet::perturbed() const {
  std::vector<CMatrix> coeffs = base.coeffs();
  for (size_t j = 0; j < coeffs.size(); ++j) coeffs[j] += deltas[j];
  return MatrixPolynomial(std::move(coeffs));
}

double defect_tolerance(const MatrixPolynomial& p, Complex mu) {
  return 1e-6 * std::max(1.0, spectral_norm(evaluate_derivative(p, mu)));
}

PerturbationSet build_from_triplets(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu,
                                    const SingularTripletSet& triplets, Rank rank) {
  const Index n = triplets.size();
  const double s1 = triplets.values(0);
  const double sn = triplets.smallest();
  if (sn <= zero_tolerance(s1)) throw_precondition("mu is numerically an eigenvalue of P; the construction degenerates");
  if (w.degree() > p.degree()) throw_precondition("weight degree exceeds the polynomial degree");

  int k = 0;
  for (Index j = 0; j < n; ++j) {
    if (triplets.values(j) - sn <= multiplicity_tolerance(s1)) ++k;
  }
  const Index first = rank == Rank::kFull ? 0 : n - k;
  const Index cols = n - first;
  CMatrix z = triplets.left.middleCols(first, cols) * triplets.right.middleCols(first, cols).adjoint();
  const CMatrix e = -sn * z;

  PerturbationSet out{std::vector<CMatrix>(static_cast<size_t>(p.degree() + 1), CMatrix::Zero(n, n)), p, k,
                      sn / weight_eval(w, std::abs(mu)), std::move(z), false};
  if (std::abs(mu) < kOriginTolerance) {
    // μ̄/|μ| is taken as 0 and the weight reduces to its constant term.
    out.deltas[0] = e;
    out.constant_weight = !w.is_constant();
    return out;
  }
  const Complex phase = std::conj(mu) / std::abs(mu);
  const double scale = weight_eval(w, std::abs(mu));
  Complex phase_j = 1.0;
  for (int j = 0; j <= p.degree(); ++j) {
    out.deltas[static_cast<size_t>(j)] = (phase_j * (w.coeff(j) / scale)) * e;
    phase_j *= phase;
  }
  return out;
}

PerturbationSet build_qhat(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
  return build_from_triplets(p, w, mu, singular_triplets(p, mu), Rank::kFull);
}

PerturbationSet build_qtilde(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
  return build_from_triplets(p, w, mu, singular_triplets(p, mu), Rank::kLow);
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::kInterior: return "interior";
    case Membership::kBoundary: return "boundary";
    case Membership::kOutside: return "outside";
  }
  return "unknown";
}

BallMembership ball_membership(const std::vector<CMatrix>& deltas, const WeightPolynomial& w, double eps,
                               double rel_tol) {
  if (!(eps >= 0.0)) throw_precondition("ball radius epsilon must be non-negative");
  BallMembership out;
  for (size_t j = 0; j < deltas.size(); ++j) {
    const double norm = spectral_norm(deltas[j]);
    const double wj = w.coeff(static_cast<int>(j));
    if (wj > 0.0) {
      out.radius = std::max(out.radius, norm / wj);
    } else if (norm > 0.0) {
      out.radius = std::numeric_limits<double>::infinity();
    }
  }
  const double tol = rel_tol * eps;
  if (std::isinf(out.radius) || out.radius > eps + tol) {
    out.classification = Membership::kOutside;
  } else if (out.radius >= eps - tol && eps > 0.0) {
    out.classification = Membership::kBoundary;
  } else {
    out.classification = Membership::kInterior;
  }
  return out;
}

EigenDistance distance_to_eigenvalue(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
  const Eigen::VectorXd s = singular_values(p, mu);
  const double sn = s(s.size() - 1);
  if (sn <= zero_tolerance(s(0))) return {0.0, true};
  return {sn / weight_eval(w, std::abs(mu)), false};
}

Complex multiple_criterion(const MatrixPolynomial& p, Complex mu, const CVector& u, const CVector& v) {
  if (u.size() != p.n() || v.size() != p.n()) throw_precondition("criterion vectors must have length n");
  if (std::abs(u.norm() - 1.0) > 1e-8 || std::abs(v.norm() - 1.0) > 1e-8) {
    throw_precondition("criterion vectors must be unit vectors");
  }
  return u.dot(evaluate_derivative(p, mu) * v);
}

const char* to_string(SaddleError e) {
  switch (e) {
    case SaddleError::kLeftWindow: return "left_window";
    case SaddleError::kConvergedToEigenvalue: return "converged_to_eigenvalue";
    case SaddleError::kFaultPoint: return "fault_point";
    case SaddleError::kNotConverged: return "not_converged";
    case SaddleError::kOriginSingularity: return "origin_singularity";
  }
  return "unknown";
}

namespace {

constexpr double kGolden = 0.6180339887498949;

class SaddleSearch {
 public:
  SaddleSearch(const MatrixPolynomial& p, const WeightPolynomial& w, const Window& window)
      : p_(p), w_(w), window_(window) {}

  double ratio(Complex z) const { return s_min(p_, z) / weight_eval(w_, std::abs(z)); }

  // ∇s_n - (s_n/w)·∇w(|λ|), the gradient of F_δ at δ = s_n/w. Empty where undefined.
  std::optional<Complex> stationarity(Complex z) const {
    const GradientValue g = grad_s_min(p_, z);
    if (!g.valid) return {};
    const double r = std::abs(z);
    if (r < kOriginTolerance) {
      if (w_.coeff(1) > 0.0) return {};
      return Complex(g.dx, g.dy);
    }
    const double s = s_min(p_, z);
    const double slope = s / weight_eval(w_, r) * weight_derivative_eval(w_, r);
    return Complex(g.dx, g.dy) - slope * z / r;
  }

  void check_iterate(Complex z) const {
    if (!window_.contains(z)) fail(SaddleError::kLeftWindow, "saddle iterate left the window", z);
    const Eigen::VectorXd s = singular_values(p_, z);
    if (s(s.size() - 1) <= zero_tolerance(s(0))) {
      fail(SaddleError::kConvergedToEigenvalue, "saddle iterate converged to an eigenvalue", z);
    }
  }

  // Damped Newton on the stationarity condition. Returns the point on success.
  std::optional<Complex> newton(Complex z, int iterations) const {
    for (int it = 0; it <= iterations; ++it) {
      check_iterate(z);
      const auto g = stationarity(z);
      if (!g) return {};
      if (std::abs(*g) < kSaddleTolerance) return z;
      if (it == iterations) break;

      const double h = 1e-6 * (1.0 + std::abs(z));
      const auto gxp = stationarity(z + h);
      const auto gxm = stationarity(z - h);
      const auto gyp = stationarity(z + Complex(0, h));
      const auto gym = stationarity(z - Complex(0, h));
      if (!gxp || !gxm || !gyp || !gym) return {};
      const Complex cx = (*gxp - *gxm) / (2.0 * h);
      const Complex cy = (*gyp - *gym) / (2.0 * h);
      Eigen::Matrix2d jac;
      jac << cx.real(), cy.real(), cx.imag(), cy.imag();
      const double det = jac.determinant();
      if (std::abs(det) <= 1e-14 * jac.squaredNorm()) return {};
      const Eigen::Vector2d d = jac.inverse() * Eigen::Vector2d(-g->real(), -g->imag());
      Complex step(d(0), d(1));
      const double cap = window_.diagonal() / 10.0;
      if (std::abs(step) > cap) step *= cap / std::abs(step);

      bool moved = false;
      for (double alpha = 1.0; alpha > 1e-4; alpha *= 0.5) {
        const Complex trial = z + alpha * step;
        if (!window_.contains(trial)) continue;
        const auto gt = stationarity(trial);
        if (gt && std::abs(*gt) < std::abs(*g)) {
          z = trial;
          moved = true;
          break;
        }
      }
      if (!moved) return {};
    }
    return {};
  }

  // Direction across the ridge through c.
  std::optional<Complex> crossing_direction(Complex c) const {
    const SingularTripletSet t = singular_triplets(p_, c);
    const Index n = t.size();
    if (n >= 2 && t.values(n - 2) - t.values(n - 1) < t.values(n - 1)) {
      const CMatrix dp = evaluate_derivative(p_, c);
      auto grad = [&](Index j) {
        const Complex z = t.left.col(j).dot(dp * t.right.col(j));
        return Complex(z.real(), -z.imag());
      };
      const Complex d = grad(n - 1) - grad(n - 2);
      if (std::abs(d) > 0.0) return d / std::abs(d);
    }
    const double h = 1e-4 * (1.0 + std::abs(c));
    const double f0 = ratio(c);
    Eigen::Matrix2d hess;
    hess(0, 0) = (ratio(c + h) - 2.0 * f0 + ratio(c - h)) / (h * h);
    hess(1, 1) = (ratio(c + Complex(0, h)) - 2.0 * f0 + ratio(c - Complex(0, h))) / (h * h);
    hess(0, 1) = hess(1, 0) =
        (ratio(c + Complex(h, h)) - ratio(c + Complex(h, -h)) - ratio(c + Complex(-h, h)) + ratio(c + Complex(-h, -h))) /
        (4.0 * h * h);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(hess);
    if (eig.eigenvalues()(0) < 0.0) {
      const Eigen::Vector2d v = eig.eigenvectors().col(0);
      return Complex(v(0), v(1));
    }
    return {};
  }

  // min over s of max over t of ratio(c + s·i·e + t·e).
  Complex ridge_minimax(Complex c, Complex e) const {
    const Complex across = e;
    const Complex along = Complex(0, 1) * e;
    const double scale = std::max(1e-8 * (1.0 + std::abs(c)), 0.05 * ratio(c) * weight_eval(w_, std::abs(c)) /
                                                                    std::max(spectral_norm(evaluate_derivative(p_, c)),
                                                                             std::numeric_limits<double>::min()));
    auto ridge_peak = [&](double s) {
      const Complex base = c + s * along;
      return optimize([&](double t) { return -ratio(base + t * across); }, scale);
    };
    const double s_best = optimize([&](double s) { return ridge_peak(s).second; }, scale).first;
    const double t_best = ridge_peak(s_best).first;
    return c + s_best * along + t_best * across;
  }

  [[noreturn]] static void fail(SaddleError code, const std::string& what, Complex z) {
    std::ostringstream msg;
    msg << what << " at (" << z.real() << ", " << z.imag() << ")";
    throw SaddleFailure(code, msg.str(), z);
  }

 private:
  // Minimizes f over the real line starting from 0: expands a bracket
  // downhill, then golden-section search. Returns (argmin, -min) so
  // ridge_peak reports the maximum value directly.
  template <typename F>
  static std::pair<double, double> optimize(F&& f, double h) {
    double a = 0.0;
    double fa = f(a);
    double b = h;
    double fb = f(b);
    if (fb > fa) {
      std::swap(a, b);
      std::swap(fa, fb);
      h = -h;
    }
    double c = b + (b - a) / kGolden;
    double fc = f(c);
    for (int k = 0; fc < fb; ++k) {
      if (k > 200) fail(SaddleError::kNotConverged, "ridge bracket did not close", Complex(c));
      a = b;
      fa = fb;
      b = c;
      fb = fc;
      c = b + (b - a) / kGolden;
      fc = f(c);
    }
    double lo = std::min(a, c);
    double hi = std::max(a, c);
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo) + std::abs(hi)); ++k) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = f(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = f(x2);
      }
    }
    return f1 < f2 ? std::pair{x1, -f1} : std::pair{x2, -f2};
  }

  const MatrixPolynomial& p_;
  const WeightPolynomial& w_;
  Window window_;
};

}  // namespace

SaddleResult find_saddle(const MatrixPolynomial& p, const WeightPolynomial& w, Complex start, const Window& window,
                         const SaddleOptions& options) {
  window.validate();
  const SaddleSearch search(p, w, window);
  search.check_iterate(start);

  auto finish = [&](Complex mu, bool ridge) {
    SaddleResult out;
    out.mu = mu;
    out.delta = search.ratio(mu);
    out.ridge_search = ridge;
    const auto g = search.stationarity(mu);
    out.grad_norm = g ? std::abs(*g) : std::numeric_limits<double>::quiet_NaN();
    return out;
  };
  auto origin_check = [&](Complex mu) {
    if (w.coeff(1) > 0.0 && std::abs(mu) <= 1e-6 * (1.0 + std::abs(start))) {
      SaddleSearch::fail(SaddleError::kOriginSingularity, "saddle lies at the origin where w(|λ|) has a corner",
                         Complex(0.0));
    }
  };

  if (const auto mu = search.newton(start, options.newton_iterations)) {
    origin_check(*mu);
    return finish(*mu, false);
  }

  std::optional<Complex> across = options.crossing;
  if (across && std::abs(*across) > 0.0) {
    *across /= std::abs(*across);
  } else {
    across = search.crossing_direction(start);
  }
  if (!across) SaddleSearch::fail(SaddleError::kNotConverged, "no ridge direction available", start);

  const Complex ridge = search.ridge_minimax(start, *across);
  search.check_iterate(ridge);
  origin_check(ridge);
  if (const auto mu = search.newton(ridge, options.newton_iterations)) {
    if (std::abs(*mu - ridge) <= 1e-3 * window.diagonal()) return finish(*mu, true);
  }

  const Eigen::VectorXd s = singular_values(p, ridge);
  if (s.size() >= 2 && s(s.size() - 2) - s(s.size() - 1) <= 1e-6 * (1.0 + s(0))) {
    SaddleResult out = finish(ridge, true);
    out.on_fault = true;
    out.grad_norm = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  SaddleSearch::fail(SaddleError::kNotConverged, "saddle search did not converge", ridge);
}

MultiplicityCertificate certify_multiple(const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
  const SingularTripletSet t = singular_triplets(p, mu);
  PerturbationSet hat = build_from_triplets(p, w, mu, t, Rank::kFull);
  PerturbationSet tilde = build_from_triplets(p, w, mu, t, Rank::kLow);
  const MatrixPolynomial qh = hat.perturbed();
  const MatrixPolynomial qt = tilde.perturbed();

  MultiplicityCertificate cert{mu, hat, tilde};
  cert.delta = hat.delta;
  cert.geometric_mult = hat.k;
  cert.constant_weight = hat.constant_weight;
  cert.residual = s_min(qh, mu);
  cert.residual_tilde = s_min(qt, mu);
  const double limit = 1e-8 * evaluation_scale(qh, mu);
  if (cert.residual > limit || cert.residual_tilde > 1e-8 * evaluation_scale(qt, mu)) {
    std::ostringstream msg;
    msg << "perturbation does not realise mu as an eigenvalue: s_min(Q_hat(mu)) = " << cert.residual
        << ", s_min(Q_tilde(mu)) = " << cert.residual_tilde << ", limit " << limit;
    throw_numerical(msg.str());
  }
  cert.geometric_mult_qhat = geometric_multiplicity(qh, mu, 1e-8);
  const Index n = t.size();
  cert.criterion = multiple_criterion(qh, mu, t.left.col(n - 1), t.right.col(n - 1));
  const bool flat = std::abs(cert.criterion) < defect_tolerance(p, mu);
  cert.multiple = cert.geometric_mult >= 2 || flat;
  cert.defective = cert.geometric_mult == 1 && flat;
  return cert;
}

namespace {

std::vector<int> node_labels(const ScalarField& field, const std::vector<int>& labels,
                             const std::vector<Complex>& zs) {
  std::vector<int> out;
  for (auto z : zs) {
    const auto [i, j] = field.grid.nearest(z);
    out.push_back(labels[field.grid.index(i, j)]);
  }
  return out;
}

bool any_shared(const std::vector<int>& labels) {
  std::set<int> seen;
  for (int l : labels) {
    if (l != 0 && !seen.insert(l).second) return true;
  }
  return false;
}

}  // namespace

DistanceResult distance_to_multiple(const MatrixPolynomial& p, const WeightPolynomial& w, double eps_max,
                                    const DistanceOptions& options) {
  if (!(eps_max > 0.0)) throw_precondition("eps_max must be positive");
  const EigenReport eig = eigenvalues(p);
  if (eig.distinct() < 2) throw_precondition("distance to multiple eigenvalues needs two distinct eigenvalues");

  DistanceResult out;
  if (eig.total_multiplicity() != eig.distinct()) {
    out.warnings.push_back("P already has a multiple eigenvalue; r is the first merge of distinct eigenvalues");
  }
  out.bounded = boundedness_check(p, w, eps_max);
  if (!out.bounded) out.warnings.push_back("pseudospectra may be unbounded below eps_max; merges are windowed");
  out.window = options.window.value_or(default_window(p, w, eig, eps_max));
  const GridSpec grid = GridSpec::from_window(out.window, options.nx, options.ny);
  const ScalarField field = compute_field(p, w, grid, options.threads);

  std::vector<Complex> inside;
  for (auto z : eig.eigenvalues) {
    if (out.window.contains(z)) {
      inside.push_back(z);
    } else {
      out.warnings.push_back("an eigenvalue lies outside the window and is ignored");
    }
  }
  if (inside.size() < 2) throw_precondition("fewer than two eigenvalues inside the window");

  double lo = 0.0;
  for (auto z : inside) {
    const auto [i, j] = grid.nearest(z);
    lo = std::max(lo, field.at(i, j));
  }
  lo = std::max(lo, std::numeric_limits<double>::min());
  auto merged = [&](double e) { return any_shared(node_labels(field, label_sublevel(field, e), inside)); };
  if (merged(lo)) throw_precondition("grid too coarse: eigenvalues share a component as soon as they are resolved");
  double hi = eps_max;
  if (!merged(hi)) throw_numerical("no merge of pseudospectrum components found up to eps_max");
  while (hi - lo > 1e-6 * hi) {
    const double mid = 0.5 * (lo + hi);
    (merged(mid) ? hi : lo) = mid;
  }
  out.grid_lo = lo;
  out.grid_hi = hi;
  out.r = 0.5 * (lo + hi);

  const std::vector<int> hi_labels = label_sublevel(field, hi);
  const std::vector<int> at = node_labels(field, hi_labels, inside);
  double best = std::numeric_limits<double>::infinity();
  int label = 0;
  for (size_t a = 0; a < inside.size(); ++a) {
    for (size_t b = a + 1; b < inside.size(); ++b) {
      if (at[a] != 0 && at[a] == at[b] && std::abs(inside[a] - inside[b]) < best) {
        best = std::abs(inside[a] - inside[b]);
        out.pair = {inside[a], inside[b]};
        label = at[a];
      }
    }
  }

  // The node that joined the pair's component last is the grid's view of the saddle.
  const Complex mid = 0.5 * (out.pair.first + out.pair.second);
  Complex start = mid;
  double closest = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const size_t k = grid.index(i, j);
      if (hi_labels[k] != label || field.values[k] <= lo) continue;
      if (std::abs(grid.point(i, j) - mid) < closest) {
        closest = std::abs(grid.point(i, j) - mid);
        start = grid.point(i, j);
      }
    }
  }

  Complex mu = start;
  bool have_mu = false;
  try {
    SaddleOptions so;
    so.crossing = out.pair.second - out.pair.first;
    out.saddle = find_saddle(p, w, start, out.window, so);
    if (std::abs(out.saddle->delta - out.r) <= 0.25 * out.r) {
      out.r = out.saddle->delta;
      mu = out.saddle->mu;
      have_mu = true;
    } else {
      out.warnings.push_back("saddle value disagrees with the grid merge; keeping the grid estimate");
    }
  } catch (const SaddleFailure& failure) {
    if (failure.code() == SaddleError::kOriginSingularity) {
      out.origin_case = true;
      mu = 0.0;
      out.r = distance_to_eigenvalue(p, w, mu).delta;
      have_mu = true;
      out.warnings.push_back("merge at the origin; certificate uses the constant weight w_0");
    } else {
      out.warnings.push_back(std::string("saddle search failed: ") + failure.what());
    }
  }

  if (have_mu) {
    try {
      out.certificate = certify_multiple(p, w, mu);
    } catch (const Error& e) {
      out.warnings.push_back(std::string("certificate failed: ") + e.what());
    }
  }

  {
    try {
      out.connected_epsilon = connect_epsilon(field, inside, lo, eps_max);
    } catch (const Error&) {
      out.warnings.push_back("eigenvalues do not all connect below eps_max");
    }
  }
  return out;
}

}  // namespace polyspectra
