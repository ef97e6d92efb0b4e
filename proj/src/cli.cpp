#include "polyspectra/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyspectra/output.hpp"
#include "polyspectra/perturbations.hpp"
#include "polyspectra/problem.hpp"

namespace polyspectra {

using nlohmann::json;

namespace {

struct Options {
  std::string command;
  std::string input;
  std::vector<double> eps;
  std::vector<int> grid;
  std::vector<double> window;
  std::vector<double> mu;
  std::vector<double> seeds;
  std::optional<double> eps_max;
  std::string svg;
  std::string json_path;
  std::string csv;
  std::string report;
  unsigned threads = 0;
};

struct Run {
  Options opt;
  std::string input_text;
  ProblemSpec spec;
  WeightPolynomial weight;
  std::map<std::string, std::string> files;
  std::vector<std::string> warnings;
};

json cjson(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json mjson(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    json c = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      r.push_back(m(i, j).real());
      c.push_back(m(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

json window_json(const Window& w) {
  return {{"x_min", w.x_min}, {"x_max", w.x_max}, {"y_min", w.y_min}, {"y_max", w.y_max}};
}

json grid_json(const GridSpec& g) {
  json out = window_json(g.window());
  out["nx"] = g.nx;
  out["ny"] = g.ny;
  return out;
}

std::string fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> epsilons(const Run& run) {
  if (!run.opt.eps.empty()) return run.opt.eps;
  if (!run.spec.epsilons.empty()) return run.spec.epsilons;
  // Half-decade sweep over [1e-4, 1e-1] times the coefficient scale.
  const double scale = max_norm(run.spec.polynomial);
  std::vector<double> out;
  for (int k = 0; k <= 6; ++k) out.push_back(scale * std::pow(10.0, -4.0 + 0.5 * k));
  return out;
}

EigenReport eigen_or_empty(Run& run) {
  if (has_nonsingular_leading(run.spec.polynomial)) return eigenvalues(run.spec.polynomial);
  run.warnings.push_back("leading coefficient is singular; eigenvalues are not shown");
  return {};
}

GridSpec resolve_grid(Run& run, const EigenReport& eig, double eps_for_window, int default_n) {
  GridSpec g;
  if (run.spec.window) {
    g = *run.spec.window;
  } else {
    if (run.opt.window.empty() && eig.eigenvalues.empty()) {
      throw_numerical("no window given and no eigenvalues to place a default window around");
    }
    g = GridSpec::from_window(default_window(run.spec.polynomial, run.weight, eig, eps_for_window), default_n,
                              default_n);
  }
  if (!run.opt.window.empty()) {
    g.x_min = run.opt.window[0];
    g.x_max = run.opt.window[1];
    g.y_min = run.opt.window[2];
    g.y_max = run.opt.window[3];
  }
  if (!run.opt.grid.empty()) {
    g.nx = run.opt.grid[0];
    g.ny = run.opt.grid[1];
  }
  g.validate();
  return g;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void emit(Run& run, const json& result, std::ostream& out) {
  const std::string text = result.dump(2) + "\n";
  if (run.opt.json_path.empty()) {
    out << text;
  } else {
    run.files[run.opt.json_path] = text;
  }
}

void cmd_eigs(Run& run, std::ostream& out) {
  const MatrixPolynomial& p = run.spec.polynomial;
  const EigenReport eig = eigenvalues(p);
  json list = json::array();
  char line[128];
  std::snprintf(line, sizeof line, "%22s %22s %5s %5s\n", "re", "im", "alg", "geo");
  out << line;
  for (size_t k = 0; k < eig.eigenvalues.size(); ++k) {
    const Complex z = eig.eigenvalues[k];
    const int geo = geometric_multiplicity(p, z, 1e-8);
    list.push_back({{"re", z.real()}, {"im", z.imag()}, {"algebraic", eig.multiplicities[k]}, {"geometric", geo}});
    std::snprintf(line, sizeof line, "%22.15g %22.15g %5d %5d\n", z.real(), z.imag(), eig.multiplicities[k], geo);
    out << line;
  }
  const json result{{"command", "eigs"},
                    {"n", p.n()},
                    {"m", p.degree()},
                    {"cluster_radius", eig.cluster_radius},
                    {"eigenvalues", std::move(list)}};
  if (!run.opt.json_path.empty()) run.files[run.opt.json_path] = result.dump(2) + "\n";
}

void cmd_field(Run& run, std::ostream& out) {
  const auto eps = epsilons(run);
  const EigenReport eig = eigen_or_empty(run);
  const GridSpec grid = resolve_grid(run, eig, max_of(eps), 201);
  const ScalarField field = compute_field(run.spec.polynomial, run.weight, grid, run.opt.threads);

  if (!run.opt.csv.empty()) run.files[run.opt.csv] = field_csv(field);
  if (!run.opt.svg.empty()) {
    SvgPlot plot(grid.window());
    for (size_t k = 0; k < eps.size(); ++k) {
      char label[32];
      std::snprintf(label, sizeof label, "eps=%.6g", eps[k]);
      plot.segments(marching_squares(field, eps[k]), layer_colour(k), label);
    }
    plot.plus_markers(eig.eigenvalues);
    run.files[run.opt.svg] = plot.str();
  }
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  emit(run, {{"command", "field"}, {"grid", grid_json(grid)}, {"epsilons", eps}, {"min", *lo}, {"max", *hi}}, out);
}

void cmd_components(Run& run, std::ostream& out) {
  const auto eps = epsilons(run);
  const EigenReport eig = eigenvalues(run.spec.polynomial);
  const GridSpec grid = resolve_grid(run, eig, max_of(eps), 201);
  const ScalarField field = compute_field(run.spec.polynomial, run.weight, grid, run.opt.threads);
  json reports = json::array();
  for (double e : eps) {
    const ComponentReport rep = components(field, e, eig);
    json comps = json::array();
    for (int c = 0; c < rep.count; ++c) {
      json members = json::array();
      for (const auto& [z, mult] : rep.eigen_assignment[static_cast<size_t>(c)]) {
        json entry = cjson(z);
        entry["multiplicity"] = mult;
        members.push_back(std::move(entry));
      }
      const bool bounded = rep.bounded[static_cast<size_t>(c)];
      if (!bounded) run.warnings.push_back("a component touches the window edge");
      comps.push_back({{"label", c + 1}, {"bounded", bounded}, {"eigenvalues", std::move(members)}});
    }
    json outside = json::array();
    for (auto z : rep.outside_window) outside.push_back(cjson(z));
    reports.push_back({{"epsilon", e},
                       {"count", rep.count},
                       {"components", std::move(comps)},
                       {"outside_window", std::move(outside)},
                       {"sufficiently_bounded", boundedness_check(run.spec.polynomial, run.weight, e)}});
  }
  emit(run, {{"command", "components"}, {"grid", grid_json(grid)}, {"reports", std::move(reports)}}, out);
}

void cmd_trace(Run& run, std::ostream& out) {
  const MatrixPolynomial& p = run.spec.polynomial;
  const auto eps = epsilons(run);
  const EigenReport eig = eigen_or_empty(run);
  const GridSpec grid = resolve_grid(run, eig, max_of(eps), 201);
  const Window win = grid.window();
  const double step = win.diagonal() / 500.0;

  std::vector<Complex> starts;
  if (!run.opt.seeds.empty()) {
    for (size_t k = 0; k + 1 < run.opt.seeds.size(); k += 2) starts.emplace_back(run.opt.seeds[k], run.opt.seeds[k + 1]);
  } else {
    starts = eig.eigenvalues;
  }

  std::vector<std::vector<Complex>> polylines;
  json curves = json::array();
  SvgPlot plot(win);
  for (size_t e = 0; e < eps.size(); ++e) {
    std::vector<size_t> layer;
    for (auto z0 : starts) {
      if (!win.contains(z0) || f_eps(p, run.weight, eps[e], z0) >= 0.0) continue;
      std::optional<Complex> seed;
      for (Complex dir : {Complex(1, 0), Complex(-1, 0), Complex(0, 1), Complex(0, -1)}) {
        try {
          seed = find_boundary_seed(p, run.weight, eps[e], z0, dir, win);
          break;
        } catch (const Error&) {
        }
      }
      if (!seed) {
        run.warnings.push_back("no boundary crossing found from a start point inside the window");
        continue;
      }
      const bool known = std::any_of(layer.begin(), layer.end(), [&](size_t id) {
        return std::any_of(polylines[id].begin(), polylines[id].end(),
                           [&](Complex q) { return std::abs(q - *seed) < 2.0 * step; });
      });
      if (known) continue;
      BoundaryCurve curve;
      try {
        curve = trace_boundary(p, run.weight, eps[e], *seed, win);
      } catch (const Error& err) {
        run.warnings.push_back(std::string("tracing skipped a seed: ") + err.what());
        continue;
      }
      layer.push_back(polylines.size());
      curves.push_back({{"curve_id", polylines.size()},
                        {"epsilon", eps[e]},
                        {"closed", curve.closed},
                        {"termination", to_string(curve.termination)},
                        {"points", curve.points.size()},
                        {"min_grad_norm", curve.min_grad_norm},
                        {"min_grad_point", cjson(curve.min_grad_point)},
                        {"interior_level_curve", curve.interior_level_curve}});
      plot.polyline(curve.points, curve.closed, layer_colour(e));
      polylines.push_back(std::move(curve.points));
    }
  }
  plot.plus_markers(eig.eigenvalues);
  if (!run.opt.csv.empty()) run.files[run.opt.csv] = curves_csv(polylines);
  if (!run.opt.svg.empty()) run.files[run.opt.svg] = plot.str();
  emit(run, {{"command", "trace"}, {"window", window_json(win)}, {"curves", std::move(curves)}}, out);
}

void cmd_faults(Run& run, std::ostream& out) {
  const MatrixPolynomial& p = run.spec.polynomial;
  const EigenReport eig = eigen_or_empty(run);
  const bool have_eps = !run.opt.eps.empty() || !run.spec.epsilons.empty();
  const auto eps = epsilons(run);
  const GridSpec grid = resolve_grid(run, eig, have_eps ? max_of(eps) : 0.0, 201);
  const SurfaceIndexMap map = build_surface_map(p, random_probes(grid.window(), kMinProbes));
  const FaultReport rep = fault_scan(p, grid, map, run.opt.threads);
  if (rep.surfaces_undefined) run.warnings.push_back("fewer than two distinct singular-value surfaces");

  json points = json::array();
  for (auto z : rep.refined_points) points.push_back(cjson(z));
  if (!run.opt.svg.empty()) {
    SvgPlot plot(grid.window());
    if (have_eps) {
      const ScalarField field = compute_field(p, run.weight, grid, run.opt.threads);
      for (size_t k = 0; k < eps.size(); ++k) {
        char label[32];
        std::snprintf(label, sizeof label, "eps=%.6g", eps[k]);
        plot.segments(marching_squares(field, eps[k]), layer_colour(k), label);
      }
    }
    plot.dots(rep.refined_points, "#555555");
    plot.plus_markers(eig.eigenvalues);
    run.files[run.opt.svg] = plot.str();
  }
  emit(run,
       {{"command", "faults"},
        {"grid", grid_json(grid)},
        {"representative", map.representative},
        {"c1", map.c1},
        {"c2", map.c2 ? json(*map.c2) : json(nullptr)},
        {"identical_surfaces", map.identical_surfaces},
        {"candidate_cells", rep.cells.size()},
        {"empty", rep.empty},
        {"points", std::move(points)}},
       out);
}

json perturbation_json(const PerturbationSet& set) {
  json deltas = json::array();
  for (const auto& d : set.deltas) deltas.push_back(mjson(d));
  json coeffs = json::array();
  const MatrixPolynomial q = set.perturbed();
  for (const auto& c : q.coeffs()) coeffs.push_back(mjson(c));
  return {{"k", set.k}, {"deltas", std::move(deltas)}, {"coefficients", std::move(coeffs)}};
}

json certificate_json(const MultiplicityCertificate& c) {
  json crit = cjson(c.criterion);
  crit["abs"] = std::abs(c.criterion);
  return {{"mu", cjson(c.mu)},
          {"delta", c.delta},
          {"geometric_multiplicity", c.geometric_mult},
          {"geometric_multiplicity_q_hat", c.geometric_mult_qhat},
          {"multiple", c.multiple},
          {"defective", c.defective},
          {"criterion", std::move(crit)},
          {"residual", c.residual},
          {"residual_tilde", c.residual_tilde},
          {"constant_weight_at_origin", c.constant_weight},
          {"q_hat", perturbation_json(c.q_hat)},
          {"q_tilde", perturbation_json(c.q_tilde)}};
}

void cmd_distance(Run& run, std::ostream& out) {
  const double eps_max = run.opt.eps_max.value_or(max_of(epsilons(run)));
  DistanceOptions options;
  options.threads = run.opt.threads;
  if (run.spec.window || !run.opt.window.empty()) {
    const GridSpec g = resolve_grid(run, {}, eps_max, options.nx);
    options.window = g.window();
    options.nx = g.nx;
    options.ny = g.ny;
  } else if (!run.opt.grid.empty()) {
    options.nx = run.opt.grid[0];
    options.ny = run.opt.grid[1];
  }
  const DistanceResult d = distance_to_multiple(run.spec.polynomial, run.weight, eps_max, options);
  for (const auto& w : d.warnings) run.warnings.push_back(w);
  if (d.certificate && d.certificate->constant_weight) {
    run.warnings.push_back("constant weight w_0 substituted at the origin");
  }

  json saddle = nullptr;
  if (d.saddle) {
    saddle = {{"mu", cjson(d.saddle->mu)},
              {"delta", d.saddle->delta},
              {"grad_norm", d.saddle->grad_norm},
              {"on_fault", d.saddle->on_fault},
              {"ridge_search", d.saddle->ridge_search}};
  }
  emit(run,
       {{"command", "distance"},
        {"r", d.r},
        {"eps_max", eps_max},
        {"grid_bracket", {d.grid_lo, d.grid_hi}},
        {"window", window_json(d.window)},
        {"pair", {cjson(d.pair.first), cjson(d.pair.second)}},
        {"saddle", std::move(saddle)},
        {"certificate", d.certificate ? certificate_json(*d.certificate) : json(nullptr)},
        {"connected_epsilon", d.connected_epsilon ? json(*d.connected_epsilon) : json(nullptr)},
        {"bounded", d.bounded},
        {"origin_case", d.origin_case},
        {"warnings", d.warnings}},
       out);
}

void cmd_perturb(Run& run, std::ostream& out) {
  if (run.opt.mu.size() != 2) throw_parse("perturb needs --mu RE IM");
  const Complex mu(run.opt.mu[0], run.opt.mu[1]);
  const EigenDistance dist = distance_to_eigenvalue(run.spec.polynomial, run.weight, mu);
  if (dist.on_spectrum) throw_precondition("mu is numerically an eigenvalue of P");
  const MultiplicityCertificate cert = certify_multiple(run.spec.polynomial, run.weight, mu);
  if (cert.constant_weight) run.warnings.push_back("constant weight w_0 substituted at the origin");
  emit(run, {{"command", "perturb"}, {"distance", dist.delta}, {"certificate", certificate_json(cert)}}, out);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return kExitParse;
    case ErrorKind::kNumerical: return kExitNumerical;
    case ErrorKind::kPrecondition: return kExitPrecondition;
  }
  return kExitOther;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  Options opt;
  CLI::App app{"Weighted pseudospectra of matrix polynomials", "polyspectra"};
  app.add_option("command", opt.command, "eigs | field | trace | components | faults | distance | perturb")
      ->required()
      ->check(CLI::IsMember({"eigs", "field", "trace", "components", "faults", "distance", "perturb"}));
  app.add_option("--input", opt.input, "problem JSON file")->required();
  app.add_option("--eps", opt.eps, "epsilon values")->check(CLI::PositiveNumber);
  app.add_option("--grid", opt.grid, "grid nodes NX NY")->expected(2)->check(CLI::Range(2, 100000));
  app.add_option("--window", opt.window, "XMIN XMAX YMIN YMAX")->expected(4);
  app.add_option("--mu", opt.mu, "point RE IM for perturb")->expected(2);
  app.add_option("--seed", opt.seeds, "trace start points RE IM [RE IM ...]");
  app.add_option("--eps-max", opt.eps_max, "upper epsilon for distance")->check(CLI::PositiveNumber);
  app.add_option("--svg", opt.svg, "SVG output path");
  app.add_option("--json", opt.json_path, "JSON output path (stdout when omitted)");
  app.add_option("--csv", opt.csv, "CSV output path");
  app.add_option("--report", opt.report, "run report JSON path");
  app.add_option("--threads", opt.threads, "worker threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (opt.seeds.size() % 2 != 0) throw CLI::ValidationError("--seed", "expects RE IM pairs");
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitParse;
  }

  try {
    std::ifstream in(opt.input, std::ios::binary);
    if (!in) {
      err << "error: cannot read input file " << opt.input << "\n";
      return kExitOther;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ProblemSpec spec = parse_problem(buf.str());
    WeightPolynomial weight = spec.weight();
    Run run{opt, buf.str(), std::move(spec), std::move(weight), {}, {}};

    if (opt.command == "eigs") cmd_eigs(run, out);
    if (opt.command == "field") cmd_field(run, out);
    if (opt.command == "trace") cmd_trace(run, out);
    if (opt.command == "components") cmd_components(run, out);
    if (opt.command == "faults") cmd_faults(run, out);
    if (opt.command == "distance") cmd_distance(run, out);
    if (opt.command == "perturb") cmd_perturb(run, out);

    for (const auto& w : run.warnings) err << "warning: " << w << "\n";
    if (!opt.report.empty()) {
      json outputs = json::array();
      for (const auto& [path, content] : run.files) outputs.push_back(path);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      const json report{{"command", opt.command},  {"input", opt.input},  {"input_digest", fnv1a(run.input_text)},
                        {"outputs", outputs},      {"wall_time_s", wall}, {"warnings", run.warnings}};
      run.files[opt.report] = report.dump(2) + "\n";
    }
    write_files_atomically(run.files);
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace polyspectra
