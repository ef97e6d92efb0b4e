#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "polyspectra/pseudospectrum.hpp"

namespace polyspectra {

/// Groups the ordered singular-value surfaces Σ_1 ≥ … ≥ Σ_n into classes of
/// numerically identical surfaces. Indices are 1-based to match s_1 … s_n.
struct SurfaceIndexMap {
  std::vector<int> representative;  // representative[j - 1] = canonical index of Σ_j (largest index in its class)
  int c1 = 0;                       // canonical index of the lowest surface
  std::optional<int> c2;            // next distinct surface above it; empty when only one surface exists
  bool identical_surfaces = false;  // some class holds more than one index

  bool has_c2() const { return c2.has_value(); }
};

struct FaultReport {
  std::vector<std::pair<int, int>> cells;  // grid nodes that are local minima of the collapsed gap below the scan threshold
  std::vector<Complex> refined_points;
  bool empty = true;
  bool surfaces_undefined = false;  // c2 undefined, so the fault set is empty by definition
};

inline constexpr int kMinProbes = 20;
inline constexpr double kSurfaceTolerance = 1e-10;
inline constexpr int kRefineIterations = 200;

/// Relative threshold 1e-8·(1 + s_1) below which a refined point counts as a fault point.
double fault_tolerance(double s1);

/// Uniform random probe points inside the window from a fixed seed.
std::vector<Complex> random_probes(const Window& window, int count, std::uint64_t seed = 0x5eed);

SurfaceIndexMap build_surface_map(const MatrixPolynomial& p, const std::vector<Complex>& probes);

/// s_{c2}(λ) - s_{c1}(λ) >= 0. Requires c2.
double collapsed_gap(const MatrixPolynomial& p, Complex lambda, const SurfaceIndexMap& map);

/// Scans the collapsed gap on the grid and refines candidate minima with a
/// Nelder–Mead search. No weight enters: the fault set does not depend on w.
FaultReport fault_scan(const MatrixPolynomial& p, const GridSpec& grid, const SurfaceIndexMap& map,
                       unsigned threads = 0);

bool is_fault_point(const MatrixPolynomial& p, Complex lambda, const SurfaceIndexMap& map, double tau);

/// Minimizes f over the plane from a start simplex of the given size.
/// Returns the best vertex after at most max_iterations steps.
template <typename F>
Complex nelder_mead(F&& f, Complex start, double size, int max_iterations);

}  // namespace polyspectra

#include "polyspectra/detail/nelder_mead.hpp"
