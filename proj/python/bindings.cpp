#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "polyspectra/cli.hpp"
#include "polyspectra/perturbations.hpp"
#include "polyspectra/problem.hpp"

namespace py = pybind11;
using namespace polyspectra;

namespace {

Window to_window(const std::array<double, 4>& w) { return Window{w[0], w[1], w[2], w[3]}; }

py::dict certificate_dict(const MultiplicityCertificate& c) {
  py::dict d;
  d["mu"] = c.mu;
  d["delta"] = c.delta;
  d["geometric_multiplicity"] = c.geometric_mult;
  d["geometric_multiplicity_q_hat"] = c.geometric_mult_qhat;
  d["multiple"] = c.multiple;
  d["defective"] = c.defective;
  d["criterion"] = c.criterion;
  d["residual"] = c.residual;
  d["residual_tilde"] = c.residual_tilde;
  d["q_hat"] = c.q_hat.deltas;
  d["q_tilde"] = c.q_tilde.deltas;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted pseudospectra, fault points and multiple-eigenvalue distances of matrix polynomials";

  py::register_exception<Error>(m, "Error");

  py::class_<MatrixPolynomial>(m, "MatrixPolynomial")
      .def(py::init<std::vector<CMatrix>>(), py::arg("coefficients"))
      .def_property_readonly("n", &MatrixPolynomial::n)
      .def_property_readonly("degree", &MatrixPolynomial::degree)
      .def_property_readonly("coefficients", &MatrixPolynomial::coeffs)
      .def("__call__", [](const MatrixPolynomial& p, Complex z) { return evaluate(p, z); });

  py::class_<WeightPolynomial>(m, "WeightPolynomial")
      .def(py::init<std::vector<double>>(), py::arg("coefficients"))
      .def_property_readonly("coefficients", &WeightPolynomial::weights)
      .def("__call__", [](const WeightPolynomial& w, double r) { return weight_eval(w, r); });

  m.def("eigenvalues", [](const MatrixPolynomial& p) {
    const EigenReport r = eigenvalues(p);
    return py::make_tuple(r.eigenvalues, r.multiplicities);
  });
  m.def("singular_values", &singular_values);
  m.def("s_min", &s_min);
  m.def("f_eps", &f_eps, py::arg("p"), py::arg("w"), py::arg("eps"), py::arg("z"));
  m.def("grad_s_min", [](const MatrixPolynomial& p, Complex z) {
    const GradientValue g = grad_s_min(p, z);
    return py::make_tuple(g.dx, g.dy, g.valid);
  });
  m.def("compute_field",
        [](const MatrixPolynomial& p, const WeightPolynomial& w, std::array<double, 4> window, int nx, int ny) {
          const ScalarField f = compute_field(p, w, GridSpec::from_window(to_window(window), nx, ny));
          py::array_t<double> out({ny, nx});
          std::copy(f.values.begin(), f.values.end(), out.mutable_data());
          return out;
        },
        py::arg("p"), py::arg("w"), py::arg("window"), py::arg("nx"), py::arg("ny"));
  m.def("component_count",
        [](const MatrixPolynomial& p, const WeightPolynomial& w, std::array<double, 4> window, int nx, int ny,
           double eps) {
          const ScalarField f = compute_field(p, w, GridSpec::from_window(to_window(window), nx, ny));
          return components(f, eps, eigenvalues(p)).count;
        });
  m.def("fault_points", [](const MatrixPolynomial& p, std::array<double, 4> window, int nx, int ny) {
    const Window win = to_window(window);
    const SurfaceIndexMap map = build_surface_map(p, random_probes(win, kMinProbes));
    return fault_scan(p, GridSpec::from_window(win, nx, ny), map).refined_points;
  });
  m.def("build_qhat", [](const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
    return build_qhat(p, w, mu).deltas;
  });
  m.def("build_qtilde", [](const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
    return build_qtilde(p, w, mu).deltas;
  });
  m.def("distance_to_eigenvalue",
        [](const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
          return distance_to_eigenvalue(p, w, mu).delta;
        });
  m.def("find_saddle", [](const MatrixPolynomial& p, const WeightPolynomial& w, Complex start,
                          std::array<double, 4> window) {
    const SaddleResult s = find_saddle(p, w, start, to_window(window));
    return py::make_tuple(s.mu, s.delta);
  });
  m.def("certify_multiple", [](const MatrixPolynomial& p, const WeightPolynomial& w, Complex mu) {
    return certificate_dict(certify_multiple(p, w, mu));
  });
  m.def("distance_to_multiple", [](const MatrixPolynomial& p, const WeightPolynomial& w, double eps_max) {
    const DistanceResult d = distance_to_multiple(p, w, eps_max);
    py::dict out;
    out["r"] = d.r;
    out["mu"] = d.saddle ? py::cast(d.saddle->mu) : py::none();
    out["connected_epsilon"] = d.connected_epsilon ? py::cast(*d.connected_epsilon) : py::none();
    out["warnings"] = d.warnings;
    return out;
  });
  m.def("load_problem", [](const std::string& path) {
    const ProblemSpec spec = load_problem(path);
    return py::make_tuple(spec.polynomial, spec.weight());
  });
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
