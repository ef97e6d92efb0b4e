#include "polyspectra/pseudospectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "polyspectra/detail/parallel.hpp"

namespace polyspectra {

void Window::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max)) throw_precondition("window needs x_min < x_max and y_min < y_max");
}

void GridSpec::validate() const {
  window().validate();
  if (nx < 2 || ny < 2) throw_precondition("grid needs at least 2 nodes per axis");
}

std::pair<int, int> GridSpec::nearest(Complex z) const {
  const int i = static_cast<int>(std::lround((z.real() - x_min) / dx()));
  const int j = static_cast<int>(std::lround((z.imag() - y_min) / dy()));
  return {std::clamp(i, 0, nx - 1), std::clamp(j, 0, ny - 1)};
}

int ComponentReport::label_of(Complex eigenvalue) const {
  for (size_t c = 0; c < eigen_assignment.size(); ++c) {
    for (const auto& [z, mult] : eigen_assignment[c]) {
      if (z == eigenvalue) return static_cast<int>(c) + 1;
    }
  }
  return 0;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kClosed: return "closed";
    case Termination::kLeftWindow: return "left_window";
    case Termination::kGradientInvalid: return "gradient_invalid";
    case Termination::kStepLimit: return "step_limit";
  }
  return "unknown";
}

double on_curve_tolerance(const MatrixPolynomial& p) { return 1e-9 * (1.0 + max_norm(p)); }

ScalarField compute_field(const MatrixPolynomial& p, const WeightPolynomial& w, const GridSpec& grid,
                          unsigned threads) {
  grid.validate();
  ScalarField field{grid, std::vector<double>(grid.size())};
  detail::parallel_for(grid.ny, threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Complex z = grid.point(i, j);
      field.values[grid.index(i, j)] = s_min(p, z) / weight_eval(w, std::abs(z));
    }
  });
  return field;
}

std::vector<int> label_sublevel(const ScalarField& field, double eps, int* count) {
  const GridSpec& g = field.grid;
  std::vector<int> labels(g.size(), 0);
  std::vector<std::pair<int, int>> stack;
  int next = 0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (labels[g.index(i, j)] != 0 || field.at(i, j) > eps) continue;
      ++next;
      labels[g.index(i, j)] = next;
      stack.push_back({i, j});
      while (!stack.empty()) {
        const auto [ci, cj] = stack.back();
        stack.pop_back();
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int ni = ci + di;
            const int nj = cj + dj;
            if (ni < 0 || nj < 0 || ni >= g.nx || nj >= g.ny) continue;
            const size_t k = g.index(ni, nj);
            if (labels[k] != 0 || field.values[k] > eps) continue;
            labels[k] = next;
            stack.push_back({ni, nj});
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

ComponentReport components(const ScalarField& field, double eps, const EigenReport& eigen) {
  if (!(eps > 0.0)) throw_precondition("components needs epsilon > 0");
  const GridSpec& g = field.grid;
  ComponentReport report;
  report.epsilon = eps;
  report.labels = label_sublevel(field, eps, &report.count);
  report.eigen_assignment.resize(static_cast<size_t>(report.count));
  report.bounded.assign(static_cast<size_t>(report.count), true);

  auto mark_edge = [&](int i, int j) {
    const int l = report.labels[g.index(i, j)];
    if (l > 0) report.bounded[static_cast<size_t>(l - 1)] = false;
  };
  for (int i = 0; i < g.nx; ++i) {
    mark_edge(i, 0);
    mark_edge(i, g.ny - 1);
  }
  for (int j = 0; j < g.ny; ++j) {
    mark_edge(0, j);
    mark_edge(g.nx - 1, j);
  }

  const Window win = g.window();
  for (size_t e = 0; e < eigen.eigenvalues.size(); ++e) {
    const Complex z = eigen.eigenvalues[e];
    if (!win.contains(z)) {
      report.outside_window.push_back(z);
      continue;
    }
    const auto [i, j] = g.nearest(z);
    const int l = report.labels[g.index(i, j)];
    if (l == 0) {
      std::ostringstream msg;
      msg << "eigenvalue (" << z.real() << ", " << z.imag() << ") lies on a grid node with s_n/w = "
          << field.at(i, j) << " > epsilon = " << eps << "; refine the grid";
      throw_precondition(msg.str());
    }
    report.eigen_assignment[static_cast<size_t>(l - 1)].push_back({z, eigen.multiplicities[e]});
  }
  return report;
}

Complex find_boundary_seed(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda0,
                           Complex direction, const Window& window) {
  window.validate();
  if (std::abs(direction) == 0.0) throw_precondition("seed direction must be non-zero");
  const Complex dir = direction / std::abs(direction);
  auto f_at = [&](double t) { return f_eps(p, w, eps, lambda0 + t * dir); };
  if (!(f_at(0.0) < 0.0)) throw_precondition("seed search must start inside the pseudospectrum (F_eps < 0)");

  // Largest t keeping the ray inside the window.
  double t_exit = std::numeric_limits<double>::infinity();
  auto clip = [&](double origin, double d, double lo, double hi) {
    if (d > 0) t_exit = std::min(t_exit, (hi - origin) / d);
    if (d < 0) t_exit = std::min(t_exit, (lo - origin) / d);
  };
  clip(lambda0.real(), dir.real(), window.x_min, window.x_max);
  clip(lambda0.imag(), dir.imag(), window.y_min, window.y_max);
  if (!(t_exit > 0.0)) throw_numerical("seed ray starts on or outside the window edge");

  double lo = 0.0;
  double hi = -1.0;
  // Fixed steps so thin excursions of the complement are not stepped over.
  const double h = 1e-3 * window.diagonal();
  for (double t = h; lo < t_exit; t += h) {
    t = std::min(t, t_exit);
    if (f_at(t) > 0.0) {
      hi = t;
      break;
    }
    lo = t;
    if (t == t_exit) break;
  }
  if (hi < 0.0) throw_numerical("F_eps has no sign change along the ray inside the window");

  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f_at(mid) > 0.0 ? hi : lo) = mid;
  }
  const double t = std::abs(f_at(lo)) <= std::abs(f_at(hi)) ? lo : hi;
  if (std::abs(f_at(t)) > on_curve_tolerance(p)) throw_numerical("seed bisection did not reach the level curve");
  return lambda0 + t * dir;
}

namespace {

Complex as_complex(const GradientValue& g) { return {g.dx, g.dy}; }

double distance_to_segment(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double t = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

}  // namespace

BoundaryCurve trace_boundary(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex seed,
                             const Window& window, const TraceOptions& options) {
  window.validate();
  const double tau = on_curve_tolerance(p);
  const double step = options.step_size > 0.0 ? options.step_size : window.diagonal() / 500.0;
  const double min_step = step * options.min_step_ratio;
  const double cos_max_turn = std::cos(std::numbers::pi / 6.0);

  if (std::abs(f_eps(p, w, eps, seed)) > tau) throw_precondition("trace seed is not on the level curve F_eps = 0");
  GradientValue g = grad_f(p, w, eps, seed);
  if (!g.valid || g.norm() <= kSaddleTolerance) throw_precondition("trace seed has no usable gradient");

  BoundaryCurve curve;
  curve.points.push_back(seed);
  curve.min_grad_norm = g.norm();
  curve.min_grad_point = seed;

  Complex at = seed;
  double h = step;
  double arc = 0.0;
  auto finish = [&](Termination t) {
    curve.termination = t;
    curve.closed = t == Termination::kClosed;
  };

  for (int k = 0; k < options.max_steps; ++k) {
    // Rotating ∇F by +90° keeps the interior (F < 0) on the left.
    const Complex tangent = Complex(-g.dy, g.dx) / g.norm();
    Complex next;
    GradientValue g_next;
    bool accepted = false;
    while (!accepted) {
      next = at + h * tangent;
      bool converged = false;
      for (int it = 0; it < options.corrector_iterations; ++it) {
        const double f = f_eps(p, w, eps, next);
        if (std::abs(f) <= tau) {
          converged = true;
          break;
        }
        const GradientValue gc = grad_f(p, w, eps, next);
        if (!gc.valid || gc.norm() <= kSaddleTolerance) break;
        next -= f * as_complex(gc) / std::norm(as_complex(gc));
      }
      if (converged && std::abs(next - at) <= 2.0 * step) {
        g_next = grad_f(p, w, eps, next);
        const bool smooth = g_next.valid && g_next.norm() > kSaddleTolerance;
        if (!smooth) {
          curve.points.push_back(next);
          finish(Termination::kGradientInvalid);
          return curve;
        }
        const Complex t_next = Complex(-g_next.dy, g_next.dx) / g_next.norm();
        accepted = (t_next * std::conj(tangent)).real() >= cos_max_turn;
      }
      if (!accepted) {
        h *= 0.5;
        if (h < min_step) {
          // Stuck at a corner. At the origin the corner comes from w(|λ|) itself.
          if (w.coeff(1) > 0.0 && std::abs(at) < 4.0 * step && std::abs(f_eps(p, w, eps, 0.0)) <= tau &&
              at != Complex(0.0)) {
            curve.points.push_back(0.0);
          }
          finish(Termination::kGradientInvalid);
          return curve;
        }
      }
    }

    if (g_next.norm() < curve.min_grad_norm) {
      curve.min_grad_norm = g_next.norm();
      curve.min_grad_point = next;
    }
    if (!window.contains(next)) {
      curve.points.push_back(next);
      finish(Termination::kLeftWindow);
      return curve;
    }
    arc += std::abs(next - at);
    if (arc > 4.0 * step && distance_to_segment(seed, at, next) <= 0.5 * step) {
      finish(Termination::kClosed);
      break;
    }
    curve.points.push_back(next);
    at = next;
    g = g_next;
    h = std::min(step, 2.0 * h);
  }
  if (curve.termination == Termination::kStepLimit) finish(Termination::kStepLimit);

  // Probe both sides at a few points to flag interior level curves.
  const size_t n_points = curve.points.size();
  const size_t stride = std::max<size_t>(1, n_points / 8);
  int probes = 0;
  int interior = 0;
  for (size_t k = 0; k < n_points; k += stride) {
    const GradientValue gp = grad_f(p, w, eps, curve.points[k]);
    if (!gp.valid || gp.norm() <= kSaddleTolerance) continue;
    const Complex normal = as_complex(gp) / gp.norm();
    ++probes;
    if (f_eps(p, w, eps, curve.points[k] + 2.0 * step * normal) <= 0.0 &&
        f_eps(p, w, eps, curve.points[k] - 2.0 * step * normal) <= 0.0) {
      ++interior;
    }
  }
  curve.interior_level_curve = probes > 0 && 2 * interior > probes;
  return curve;
}

namespace {

std::set<int> labels_at(const ScalarField& field, const std::vector<int>& labels, const std::vector<Complex>& zs) {
  std::set<int> out;
  const Window win = field.grid.window();
  for (auto z : zs) {
    if (!win.contains(z)) continue;
    const auto [i, j] = field.grid.nearest(z);
    out.insert(labels[field.grid.index(i, j)]);
  }
  return out;
}

bool groups_merged(const ScalarField& field, const std::vector<Complex>& a, const std::vector<Complex>& b,
                   double eps) {
  const auto labels = label_sublevel(field, eps);
  const auto la = labels_at(field, labels, a);
  for (int l : labels_at(field, labels, b)) {
    if (l != 0 && la.count(l)) return true;
  }
  return false;
}

bool all_connected(const ScalarField& field, const std::vector<Complex>& zs, double eps) {
  const auto labels = labels_at(field, label_sublevel(field, eps), zs);
  return labels.size() == 1 && *labels.begin() != 0;
}

template <typename Pred>
double bisect_epsilon(Pred holds, double lo, double hi, double rel_tol, const char* what) {
  if (!(lo > 0.0) || !(lo < hi)) throw_precondition(std::string(what) + ": need 0 < eps_lo < eps_hi");
  if (holds(lo)) throw_precondition(std::string(what) + ": condition already holds at eps_lo");
  if (!holds(hi)) throw_precondition(std::string(what) + ": condition does not hold at eps_hi");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double merge_epsilon(const ScalarField& field, const std::vector<Complex>& group_a,
                     const std::vector<Complex>& group_b, double eps_lo, double eps_hi, double rel_tol) {
  if (group_a.empty() || group_b.empty()) throw_precondition("merge_epsilon needs two non-empty eigenvalue groups");
  return bisect_epsilon([&](double e) { return groups_merged(field, group_a, group_b, e); }, eps_lo, eps_hi,
                        rel_tol, "merge_epsilon");
}

double connect_epsilon(const ScalarField& field, const std::vector<Complex>& eigenvalues, double eps_lo,
                       double eps_hi, double rel_tol) {
  if (eigenvalues.size() < 2) throw_precondition("connect_epsilon needs at least two eigenvalues");
  return bisect_epsilon([&](double e) { return all_connected(field, eigenvalues, e); }, eps_lo, eps_hi, rel_tol,
                        "connect_epsilon");
}

bool boundedness_check(const MatrixPolynomial& p, const WeightPolynomial& w, double eps) {
  if (!has_nonsingular_leading(p)) throw_numerical("boundedness check needs a nonsingular leading coefficient");
  const double wm = w.coeff(p.degree());
  if (wm == 0.0) return true;
  Eigen::JacobiSVD<CMatrix> svd(p.leading());
  return eps * wm < svd.singularValues()(p.n() - 1);
}

Window default_window(const MatrixPolynomial& p, const WeightPolynomial& w, const EigenReport& eigen,
                      double eps) {
  double radius = 0.0;
  for (auto z : eigen.eigenvalues) radius = std::max(radius, std::abs(z));
  if (eigen.eigenvalues.empty()) return Window{-1.0, 1.0, -1.0, 1.0};

  double x_lo = eigen.eigenvalues.front().real();
  double x_hi = x_lo;
  double y_lo = eigen.eigenvalues.front().imag();
  double y_hi = y_lo;
  for (auto z : eigen.eigenvalues) {
    x_lo = std::min(x_lo, z.real());
    x_hi = std::max(x_hi, z.real());
    y_lo = std::min(y_lo, z.imag());
    y_hi = std::max(y_hi, z.imag());
  }
  const double cx = 0.5 * (x_lo + x_hi);
  const double cy = 0.5 * (y_lo + y_hi);
  double hx = 0.5 * (x_hi - x_lo);
  double hy = 0.5 * (y_hi - y_lo);
  const double floor = std::max({0.25 * std::max(hx, hy), 0.05 * (1.0 + radius)});
  hx = 1.5 * std::max(hx, floor);
  hy = 1.5 * std::max(hy, floor);
  Window win{cx - hx, cx + hx, cy - hy, cy + hy};

  if (eps > 0.0) {
    const double cap = 4.0 * (1.0 + radius);
    constexpr int kRays = 16;
    for (auto z : eigen.eigenvalues) {
      for (int r = 0; r < kRays; ++r) {
        const Complex dir = std::polar(1.0, 2.0 * std::numbers::pi * r / kRays);
        double h = 1e-3 * (1.0 + radius);
        double t = h;
        while (t < cap && f_eps(p, w, eps, z + t * dir) <= 0.0) {
          h *= 1.5;
          t += h;
        }
        const Complex edge = z + 1.1 * std::min(t, cap) * dir;
        win.x_min = std::min(win.x_min, edge.real());
        win.x_max = std::max(win.x_max, edge.real());
        win.y_min = std::min(win.y_min, edge.imag());
        win.y_max = std::max(win.y_max, edge.imag());
      }
    }
  }
  return win;
}

std::vector<Segment> marching_squares(const ScalarField& field, double level) {
  const GridSpec& g = field.grid;
  std::vector<Segment> out;
  auto cross = [&](Complex a, double va, Complex b, double vb) {
    const double t = (level - va) / (vb - va);
    return a + t * (b - a);
  };
  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      // corners counter-clockwise from the lower-left node
      const Complex c[4] = {g.point(i, j), g.point(i + 1, j), g.point(i + 1, j + 1), g.point(i, j + 1)};
      const double v[4] = {field.at(i, j), field.at(i + 1, j), field.at(i + 1, j + 1), field.at(i, j + 1)};
      int mask = 0;
      for (int k = 0; k < 4; ++k) {
        if (v[k] <= level) mask |= 1 << k;
      }
      if (mask == 0 || mask == 15) continue;
      Complex edge[4];
      bool has[4] = {false, false, false, false};
      for (int k = 0; k < 4; ++k) {
        const int l = (k + 1) % 4;
        if (((mask >> k) & 1) != ((mask >> l) & 1)) {
          edge[k] = cross(c[k], v[k], c[l], v[l]);
          has[k] = true;
        }
      }
      if (mask == 5 || mask == 10) {
        // Saddle cell: the centre value decides which corners connect.
        const bool centre_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) <= level;
        const bool joins_03 = (mask == 5) != centre_in;
        if (joins_03) {
          out.push_back({edge[3], edge[0]});
          out.push_back({edge[1], edge[2]});
        } else {
          out.push_back({edge[0], edge[1]});
          out.push_back({edge[2], edge[3]});
        }
        continue;
      }
      Complex pts[2];
      int n = 0;
      for (int k = 0; k < 4 && n < 2; ++k) {
        if (has[k]) pts[n++] = edge[k];
      }
      out.push_back({pts[0], pts[1]});
    }
  }
  return out;
}

}  // namespace polyspectra
