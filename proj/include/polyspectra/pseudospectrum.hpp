#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "polyspectra/svdcore.hpp"

namespace polyspectra {

struct Window {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  bool contains(Complex z) const {
    return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min && z.imag() <= y_max;
  }
  double diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }
  void validate() const;
};

/// Rectangle sampled at nx × ny nodes, both ends included.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  int nx = 2;
  int ny = 2;

  static GridSpec from_window(const Window& w, int nx, int ny) {
    return GridSpec{w.x_min, w.x_max, w.y_min, w.y_max, nx, ny};
  }
  Window window() const { return Window{x_min, x_max, y_min, y_max}; }

  void validate() const;
  double dx() const { return (x_max - x_min) / (nx - 1); }
  double dy() const { return (y_max - y_min) / (ny - 1); }
  double cell_diagonal() const { return std::hypot(dx(), dy()); }
  Complex point(int i, int j) const { return {x_min + i * dx(), y_min + j * dy()}; }
  size_t index(int i, int j) const { return static_cast<size_t>(j) * static_cast<size_t>(nx) + static_cast<size_t>(i); }
  size_t size() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
  /// Nearest node, clamped into the grid.
  std::pair<int, int> nearest(Complex z) const;
};

/// Samples of s_n(λ)/w(|λ|); row-major with x varying fastest. One field
/// answers ε-membership for every ε.
struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  double at(int i, int j) const { return values[grid.index(i, j)]; }
};

struct ComponentReport {
  double epsilon = 0.0;
  int count = 0;
  std::vector<int> labels;  // per grid node, 0 = outside, components numbered 1..count
  // eigen_assignment[label - 1] lists (eigenvalue, algebraic multiplicity)
  std::vector<std::vector<std::pair<Complex, int>>> eigen_assignment;
  std::vector<bool> bounded;  // false when the component touches the grid edge
  std::vector<Complex> outside_window;  // eigenvalues not inside the grid rectangle

  /// Component label of an assigned eigenvalue, 0 when it was not assigned.
  int label_of(Complex eigenvalue) const;
};

enum class Termination { kClosed, kLeftWindow, kGradientInvalid, kStepLimit };

const char* to_string(Termination t);

struct BoundaryCurve {
  std::vector<Complex> points;
  bool closed = false;
  Termination termination = Termination::kStepLimit;
  // Smallest ‖∇F_ε‖ met along the curve and where; small values flag a nearby saddle.
  double min_grad_norm = 0.0;
  Complex min_grad_point{};
  // Both sides of the traced curve lie inside Λ_ε, so the curve is a level
  // curve of F_ε in the interior and not part of the boundary.
  bool interior_level_curve = false;
};

struct TraceOptions {
  double step_size = 0.0;  // 0 selects diag(window)/500
  int max_steps = 20000;
  int corrector_iterations = 20;
  double min_step_ratio = 1e-6;  // step halving stops below step_size * ratio
};

/// 1e-9·(1 + ‖P‖).
double on_curve_tolerance(const MatrixPolynomial& p);
inline constexpr double kSaddleTolerance = 1e-7;

ScalarField compute_field(const MatrixPolynomial& p, const WeightPolynomial& w, const GridSpec& grid,
                          unsigned threads = 0);

/// 8-connected labeling of {value <= ε} with eigenvalues assigned to the
/// component of their nearest node. Throws when an eigenvalue's nearest node
/// is not in the sublevel set (the grid is too coarse for this ε).
ComponentReport components(const ScalarField& field, double eps, const EigenReport& eigen);

/// Labeling only; no eigenvalue bookkeeping.
std::vector<int> label_sublevel(const ScalarField& field, double eps, int* count = nullptr);

/// Bracket-and-bisect along λ₀ + t·direction for a zero of F_ε.
Complex find_boundary_seed(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex lambda0,
                           Complex direction, const Window& window);

/// Predictor-corrector tracing of F_ε = 0 with the interior kept on the left.
BoundaryCurve trace_boundary(const MatrixPolynomial& p, const WeightPolynomial& w, double eps, Complex seed,
                             const Window& window, const TraceOptions& options = {});

/// Smallest grid ε (to within tol·ε_hi) at which a component holds
/// eigenvalues from both groups.
double merge_epsilon(const ScalarField& field, const std::vector<Complex>& group_a,
                     const std::vector<Complex>& group_b, double eps_lo, double eps_hi, double rel_tol = 1e-6);

/// Smallest grid ε at which all listed eigenvalues share one component.
double connect_epsilon(const ScalarField& field, const std::vector<Complex>& eigenvalues, double eps_lo,
                       double eps_hi, double rel_tol = 1e-6);

/// Sufficient condition for a bounded Λ_ε: ε·w_m < 1/‖P_m^{-1}‖.
bool boundedness_check(const MatrixPolynomial& p, const WeightPolynomial& w, double eps);

/// Eigenvalue bounding box inflated by 50%, extended to cover where rays from
/// each eigenvalue leave Λ_ε.
Window default_window(const MatrixPolynomial& p, const WeightPolynomial& w, const EigenReport& eigen,
                      double eps);

/// One contour segment per marching-squares crossing of value = level.
struct Segment {
  Complex a;
  Complex b;
};
std::vector<Segment> marching_squares(const ScalarField& field, double level);

}  // namespace polyspectra
