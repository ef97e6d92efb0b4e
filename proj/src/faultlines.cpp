#include "polyspectra/faultlines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyspectra/detail/parallel.hpp"

namespace polyspectra {

double fault_tolerance(double s1) { return 1e-8 * (1.0 + s1); }

std::vector<Complex> random_probes(const Window& window, int count, std::uint64_t seed) {
  window.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(window.x_min, window.x_max);
  std::uniform_real_distribution<double> uy(window.y_min, window.y_max);
  std::vector<Complex> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double x = ux(rng);
    out.emplace_back(x, uy(rng));
  }
  return out;
}

SurfaceIndexMap build_surface_map(const MatrixPolynomial& p, const std::vector<Complex>& probes) {
  if (static_cast<int>(probes.size()) < kMinProbes) {
    throw_precondition("surface identification needs at least " + std::to_string(kMinProbes) + " probe points");
  }
  const int n = static_cast<int>(p.n());
  // same[j] is true while Σ_j and Σ_{j+1} have agreed at every probe so far.
  std::vector<bool> same(static_cast<size_t>(std::max(n - 1, 0)), true);
  for (auto z : probes) {
    const Eigen::VectorXd s = singular_values(p, z);
    const double tol = kSurfaceTolerance * std::max(1.0, s(0));
    for (int j = 0; j + 1 < n; ++j) {
      if (std::abs(s(j) - s(j + 1)) > tol) same[static_cast<size_t>(j)] = false;
    }
  }

  SurfaceIndexMap map;
  map.representative.assign(static_cast<size_t>(n), 0);
  for (int j = n; j >= 1; --j) {
    const bool joins_below = j < n && same[static_cast<size_t>(j - 1)];
    map.representative[static_cast<size_t>(j - 1)] = joins_below ? map.representative[static_cast<size_t>(j)] : j;
    if (joins_below) map.identical_surfaces = true;
  }
  map.c1 = map.representative.back();
  for (int j = n; j >= 1; --j) {
    if (map.representative[static_cast<size_t>(j - 1)] != map.c1) {
      map.c2 = map.representative[static_cast<size_t>(j - 1)];
      break;
    }
  }
  return map;
}

double collapsed_gap(const MatrixPolynomial& p, Complex lambda, const SurfaceIndexMap& map) {
  if (!map.c2) throw_precondition("collapsed gap needs two distinct singular-value surfaces");
  const Eigen::VectorXd s = singular_values(p, lambda);
  return s(*map.c2 - 1) - s(map.c1 - 1);
}

FaultReport fault_scan(const MatrixPolynomial& p, const GridSpec& grid, const SurfaceIndexMap& map,
                       unsigned threads) {
  grid.validate();
  FaultReport report;
  if (!map.c2) {
    report.surfaces_undefined = true;
    return report;
  }

  std::vector<double> g(grid.size());
  detail::parallel_for(grid.ny, threads, [&](int j) {
    for (int i = 0; i < grid.nx; ++i) g[grid.index(i, j)] = collapsed_gap(p, grid.point(i, j), map);
  });

  const double diag = grid.cell_diagonal();
  std::vector<std::pair<int, int>> candidates;
  for (int j = 1; j + 1 < grid.ny; ++j) {
    for (int i = 1; i + 1 < grid.nx; ++i) {
      const double v = g[grid.index(i, j)];
      bool minimum = true;
      double lipschitz = 0.0;
      for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const double u = g[grid.index(i + di, j + dj)];
          if (u < v) minimum = false;
          lipschitz = std::max(lipschitz, std::abs(u - v) / std::abs(grid.point(i + di, j + dj) - grid.point(i, j)));
        }
      }
      if (minimum && v <= 10.0 * diag * lipschitz) candidates.emplace_back(i, j);
    }
  }
  report.cells = candidates;

  std::vector<std::optional<Complex>> refined(candidates.size());
  const double size = 0.5 * std::min(grid.dx(), grid.dy());
  detail::parallel_for(static_cast<int>(candidates.size()), threads, [&](int k) {
    const auto [i, j] = candidates[static_cast<size_t>(k)];
    auto gap_at = [&](Complex z) { return collapsed_gap(p, z, map); };
    const Complex z = nelder_mead(gap_at, grid.point(i, j), size, kRefineIterations);
    const double s1 = singular_values(p, z)(0);
    if (gap_at(z) <= fault_tolerance(s1)) refined[static_cast<size_t>(k)] = z;
  });

  // candidates are already in scan order, so deduplication is deterministic.
  for (const auto& z : refined) {
    if (!z) continue;
    const bool duplicate = std::any_of(report.refined_points.begin(), report.refined_points.end(),
                                       [&](Complex q) { return std::abs(q - *z) < 0.5 * diag; });
    if (!duplicate) report.refined_points.push_back(*z);
  }
  report.empty = report.refined_points.empty();
  return report;
}

bool is_fault_point(const MatrixPolynomial& p, Complex lambda, const SurfaceIndexMap& map, double tau) {
  return collapsed_gap(p, lambda, map) <= tau;
}

}  // namespace polyspectra
