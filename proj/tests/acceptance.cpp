// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "polyspectra/faultlines.hpp"
#include "properties.hpp"

using namespace polyspectra;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes << " failed: " << what << ";";
    }
  }
};

double max_entry_error(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

const Window kExample6Window{0.2, 2.8, -1.0, 1.0};

void ac1(Check& c) {
  const auto [p, w] = oracle::load("example6.json");
  const Eigen::VectorXd s = singular_values(p, 1.4145);
  c.notes << " s1=" << s(0) << " s2=" << s(1);
  c.expect(std::abs(s(0) - 1.4650) <= 5e-4, "s1 = 1.4650 +- 5e-4");
  c.expect(std::abs(s(1) - 0.0402) <= 5e-4, "s2 = 0.0402 +- 5e-4");
}

void ac2(Check& c) {
  const auto [p, w] = oracle::load("example6.json");
  const Complex mu = 1.4145;
  const CMatrix dhat = oracle::matrix({{-0.0031, -0.0086}, {0.0086, -0.0031}});
  const CMatrix dtilde = oracle::matrix({{-0.0021, 0.0002}, {0.0088, -0.0010}});
  const std::vector<CMatrix> qhat{oracle::matrix({{0.9969, -0.0086}, {0.0086, 3.9969}}),
                                  oracle::matrix({{-2.0031, 0.9914}, {0.0086, -4.0031}}),
                                  oracle::matrix({{0.9969, -0.0086}, {0.0086, 0.9969}})};
  const std::vector<CMatrix> qtilde{oracle::matrix({{0.9979, 0.0002}, {0.0088, 3.9990}}),
                                    oracle::matrix({{-2.0021, 1.0002}, {0.0088, -4.0010}}),
                                    oracle::matrix({{0.9979, 0.0002}, {0.0088, 0.9990}})};
  const PerturbationSet hat = build_qhat(p, w, mu);
  const PerturbationSet tilde = build_qtilde(p, w, mu);
  const MatrixPolynomial qh = hat.perturbed();
  const MatrixPolynomial qt = tilde.perturbed();
  double entry = 0.0;
  double norm_err = 0.0;
  for (size_t j = 0; j < 3; ++j) {
    entry = std::max({entry, max_entry_error(hat.deltas[j], dhat), max_entry_error(tilde.deltas[j], dtilde),
                      max_entry_error(qh.coeff(static_cast<int>(j)), qhat[j]),
                      max_entry_error(qt.coeff(static_cast<int>(j)), qtilde[j])});
    norm_err = std::max({norm_err, std::abs(spectral_norm(hat.deltas[j]) - 0.0091),
                         std::abs(spectral_norm(tilde.deltas[j]) - 0.0091)});
  }
  c.notes << " max entry error " << entry << ", norm error " << norm_err;
  c.expect(entry <= 1e-3, "reference matrices within 1e-3");
  c.expect(norm_err <= 2e-4, "norms 0.0091 +- 2e-4");
  const double rh = s_min(qh, mu);
  const double rt = s_min(qt, mu);
  c.notes << ", residuals " << rh << " " << rt;
  c.expect(rh < 1e-8 && rt < 1e-8, "s_min(Q(mu)) < 1e-8");

  // the criterion vanishes at the stationary point that 1.4145 rounds
  const SaddleResult s = find_saddle(p, w, mu, kExample6Window);
  const MultiplicityCertificate cert = certify_multiple(p, w, s.mu);
  c.notes << ", refined mu " << s.mu.real() << ", |criterion| " << std::abs(cert.criterion);
  c.expect(std::abs(s.mu - mu) <= 5e-4, "refined mu near 1.4145");
  c.expect(std::abs(cert.criterion) < 1e-6, "|u* Q'(mu) v| < 1e-6");
  c.expect(cert.geometric_mult == 1 && cert.geometric_mult_qhat == 1, "geometric multiplicity 1");
  c.expect(certify_multiple(p, w, mu).geometric_mult == 1, "geometric multiplicity 1 at 1.4145");
}

void ac3(Check& c) {
  const auto [p, w] = oracle::load("example6.json");
  const EigenReport eig = eigenvalues(p);
  const ScalarField f = compute_field(p, w, GridSpec::from_window(kExample6Window, 401, 401));
  const int lo = components(f, 0.005, eig).count;
  const int hi = components(f, 0.02, eig).count;
  const double merge = merge_epsilon(f, {eig.eigenvalues[0]}, {eig.eigenvalues[1]}, 0.005, 0.02);
  const SaddleResult s = find_saddle(p, w, 1.3, kExample6Window);
  c.notes << " counts " << lo << "," << hi << ", merge " << merge << ", saddle " << s.mu.real();
  c.expect(lo == 2 && hi == 1, "counts 2 and 1");
  c.expect(std::abs(merge - 0.0091) <= 2e-4, "merge 0.0091 +- 2e-4");
  c.expect(std::abs(s.mu - 1.4145) <= 5e-4, "saddle 1.4145 +- 5e-4");
}

void ac4(Check& c) {
  const auto [p, w] = oracle::load("example7.json");
  const EigenReport eig = eigenvalues(p);
  const std::vector<Complex> reference{{-0.08, 1.45}, {-0.08, -1.45}, {-0.75, 0.86},
                                     {-0.75, -0.86}, {-0.51, 1.25}, {-0.51, -1.25}};
  double worst = 0.0;
  for (Complex z : reference) {
    double best = 1e300;
    for (Complex e : eig.eigenvalues) best = std::min(best, std::abs(e - z));
    worst = std::max(worst, best);
  }
  c.notes << " eigenvalue error " << worst;
  c.expect(eig.distinct() == 6 && worst <= 0.01, "six eigenvalues within 0.01");
  const ScalarField f = compute_field(p, w, GridSpec{-3, 2, -4, 4, 401, 401});
  const int n02 = components(f, 0.02, eig).count;
  const int n10 = components(f, 0.1, eig).count;
  c.notes << ", counts " << n02 << "," << n10;
  c.expect(n02 == 6 && n10 == 1, "counts 6 and 1");
  const DistanceResult d = distance_to_multiple(p, w, 0.2);
  c.notes << ", r " << d.r << ", eps2 " << (d.connected_epsilon ? *d.connected_epsilon : -1.0);
  c.expect(d.r > 0.02 && d.r < 0.05, "r in (0.02, 0.05)");
  c.expect(d.connected_epsilon && *d.connected_epsilon > 0.05 && *d.connected_epsilon < 0.1, "eps2 in (0.05, 0.1)");
}

void ac5(Check& c) {
  const auto [p, w] = oracle::load("conic_pencil.json");
  const Eigen::VectorXd s = singular_values(p, 0.0);
  const double target = std::sqrt(5.0 / 16.0);
  c.notes << " s2-target " << s(1) - target << ", s3-target " << s(2) - target;
  c.expect(std::abs(s(1) - target) <= 1e-10 && std::abs(s(2) - target) <= 1e-10, "s2 = s3 = sqrt(5/16)");
  c.expect(!grad_s_min(p, 0.0).valid, "gradient invalid at 0");
  const SurfaceIndexMap map = build_surface_map(p, random_probes(Window{-2, 2, -2, 2}, kMinProbes));
  c.expect(is_fault_point(p, 0.0, map, fault_tolerance(s(0))), "0 is a fault point");
}

void ac6(Check& c) {
  auto scan = [](const MatrixPolynomial& p, const GridSpec& g) {
    return fault_scan(p, g, build_surface_map(p, random_probes(g.window(), kMinProbes)));
  };
  const MatrixPolynomial p3 = oracle::load("example3.json").p;
  const FaultReport r3 = scan(p3, GridSpec{-2, 2, -2, 2, 201, 201});
  c.notes << " example3: " << r3.refined_points.size() << " point(s)";
  c.expect(r3.refined_points.size() == 1 && std::abs(r3.refined_points[0]) <= 1e-4, "one point within 1e-4 of 0");

  const FaultReport r4 = scan(oracle::load("example4.json").p, GridSpec{-2, 3, -2, 2, 201, 201});
  c.expect(r4.empty, "example4 empty");

  const MatrixPolynomial p5 = oracle::load("example5.json").p;
  const GridSpec g5{-2, 3, -2, 2, 201, 201};
  const FaultReport r5 = scan(p5, g5);
  double worst = 0.0;
  for (Complex z : r5.refined_points) {
    const double d = std::min(std::abs(std::abs(z - 0.5) - std::sqrt(3.0) / 2.0), std::abs(z.real() - 0.5));
    worst = std::max(worst, d);
  }
  c.notes << ", example5: " << r5.refined_points.size() << " points, worst distance " << worst / g5.cell_diagonal()
          << " cells";
  c.expect(!r5.empty && worst <= 2.0 * g5.cell_diagonal(), "example5 points near circle or line");

  const MatrixPolynomial p2 = oracle::load("example2.json").p;
  const SurfaceIndexMap m2 = build_surface_map(p2, random_probes(Window{-3, 3, -3, 3}, kMinProbes));
  c.expect(is_fault_point(p2, 1.0, m2, fault_tolerance(singular_values(p2, 1.0)(0))), "example2 fault at 1");
}

void record(Check& c, const char* name, const properties::Outcome& o) {
  c.notes << " " << name << " " << o.violations << "/" << o.checked;
  for (const auto& line : o.log) c.notes << " [" << line << "]";
  c.expect(o.violations == 0 && o.checked > 0, std::string(name) + " without violations");
}

void ac7(Check& c) {
  record(c, "(a)", properties::component_count_bound(50, 10, 161, 7001));
  record(c, "(b)", properties::gradient_vs_differences(200, 1e-5, 7002));
  record(c, "(c)", properties::ball_inclusion(5, 100, 7003));
  record(c, "(d)", properties::no_spurious_minima(20, 201, 7004));
  record(c, "(e)", properties::voronoi_faults(10, 161, 7005));
}

void ac8(Check& c) {
  const auto [p, w] = oracle::load("scalar_disc.json");
  const Complex a(0.5, 0.25);
  const Window win{-1, 2, -1, 1.5};
  const BoundaryCurve curve = trace_boundary(p, w, 0.5, find_boundary_seed(p, w, 0.5, a, 1.0, win), win);
  double deviation = 0.0;
  for (Complex z : curve.points) deviation = std::max(deviation, std::abs(std::abs(z - a) - 0.5));
  c.notes << " circle deviation " << deviation;
  c.expect(curve.closed && deviation < 1e-6, "closed circle within 1e-6");

  const auto [d, unit] = oracle::load("diag_pm1.json");
  const DistanceResult r = distance_to_multiple(d, unit, 2.0);
  c.notes << ", r " << r.r << ", saddle " << (r.saddle ? std::abs(r.saddle->mu) : -1.0);
  c.expect(std::abs(r.r - 1.0) <= 1e-3, "r = 1 +- 1e-3");
  c.expect(r.saddle && std::abs(r.saddle->mu) <= 1e-3, "saddle at 0");
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "double-eigenvalue quadratic: singular values at 1.4145", 1.0, ac1},
      {"AC2", "double-eigenvalue quadratic: boundary perturbations and certificate", 1.0, ac2},
      {"AC3", "double-eigenvalue quadratic: merge at 0.0091 and saddle", 30.0, ac3},
      {"AC4", "damped system: eigenvalues, components, r and connection threshold", 60.0, ac4},
      {"AC5", "conic double point pencil", 1.0e9, ac5},
      {"AC6", "fault fixtures", 1.0e9, ac6},
      {"AC7", "property suites (a)-(e)", 600.0, ac7},
      {"AC8", "disc boundary and diag(l-1, l+1) distance", 1.0e9, ac8},
  };
  int failures = 0;
  for (const auto& crit : criteria) {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.body(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes << " exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > crit.budget_s) {
      c.ok = false;
      c.notes << " over time budget " << crit.budget_s << " s;";
    }
    failures += !c.ok;
    std::printf("[%s] %s %s (%.2f s):%s\n", c.ok ? "PASS" : "FAIL", crit.id, crit.title, secs, c.notes.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
