#include "polyspectra/problem.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polyspectra {

using nlohmann::json;

const char* to_string(WeightMode mode) {
  switch (mode) {
    case WeightMode::kConstant: return "constant";
    case WeightMode::kUnit: return "unit";
    case WeightMode::kCoefficientNorms: return "coefficient_norms";
    case WeightMode::kCustom: return "custom";
  }
  return "unknown";
}

WeightPolynomial ProblemSpec::weight() const {
  switch (weight_mode) {
    case WeightMode::kUnit: return WeightPolynomial::unit();
    case WeightMode::kConstant:
    case WeightMode::kCustom: return WeightPolynomial(weight_values);
    case WeightMode::kCoefficientNorms: {
      std::vector<double> w;
      for (const auto& c : polynomial.coeffs()) w.push_back(spectral_norm(c));
      if (!(w.front() > 0.0)) throw_precondition("coefficient_norms weight needs a nonzero P_0");
      return WeightPolynomial(std::move(w));
    }
  }
  throw_precondition("unknown weight mode");
}

namespace {

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw_parse(path + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw_parse(path + "." + key + ": missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw_parse(path + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw_parse(path + ": expected an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw_parse(path + ": expected an array of numbers");
  std::vector<double> out;
  for (size_t k = 0; k < v.size(); ++k) out.push_back(number(v[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

Eigen::MatrixXd real_matrix(const json& v, int n, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != n) throw_parse(path + ": expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const std::string row = path + "[" + std::to_string(i) + "]";
    const auto values = number_list(v[static_cast<size_t>(i)], row);
    if (static_cast<int>(values.size()) != n) throw_parse(row + ": expected " + std::to_string(n) + " entries");
    for (int j = 0; j < n; ++j) out(i, j) = values[static_cast<size_t>(j)];
  }
  return out;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Parse-level errors in library constructors keep their own kind, with the path prepended.
template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind() == ErrorKind::kPrecondition ? ErrorKind::kParse : e.kind(), path + ": " + e.what());
  }
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw_parse(std::string("malformed JSON: ") + e.what());
  }

  const int n = integer(field(doc, "n", "$"), "$.n");
  const int m = integer(field(doc, "m", "$"), "$.m");
  if (n < 1) throw_parse("$.n: must be at least 1");
  if (m < 0) throw_parse("$.m: must be non-negative");
  const json& coeffs = field(doc, "coefficients", "$");
  if (!coeffs.is_array() || static_cast<int>(coeffs.size()) != m + 1) {
    throw_parse("$.coefficients: expected m + 1 = " + std::to_string(m + 1) + " matrices");
  }
  std::vector<CMatrix> mats;
  for (int j = 0; j <= m; ++j) {
    const std::string path = "$.coefficients[" + std::to_string(j) + "]";
    const json& c = coeffs[static_cast<size_t>(j)];
    const Eigen::MatrixXd re = real_matrix(field(c, "re", path), n, path + ".re");
    const Eigen::MatrixXd im = real_matrix(field(c, "im", path), n, path + ".im");
    CMatrix z(n, n);
    z.real() = re;
    z.imag() = im;
    mats.push_back(std::move(z));
  }

  ProblemSpec spec{MatrixPolynomial(std::move(mats)), WeightMode::kUnit, {}, std::nullopt, {}};
  const json& weight = field(doc, "weight", "$");
  const json& mode = field(weight, "mode", "$.weight");
  if (!mode.is_string()) throw_parse("$.weight.mode: expected a string");
  const std::string name = mode.get<std::string>();
  if (name == "unit") {
    spec.weight_mode = WeightMode::kUnit;
  } else if (name == "constant") {
    spec.weight_mode = WeightMode::kConstant;
    spec.weight_values = {number(field(weight, "value", "$.weight"), "$.weight.value")};
  } else if (name == "coefficient_norms") {
    spec.weight_mode = WeightMode::kCoefficientNorms;
  } else if (name == "custom") {
    spec.weight_mode = WeightMode::kCustom;
    spec.weight_values = number_list(field(weight, "coefficients", "$.weight"), "$.weight.coefficients");
    if (static_cast<int>(spec.weight_values.size()) > m + 1) {
      throw_parse("$.weight.coefficients: at most m + 1 weights allowed");
    }
  } else {
    throw_parse("$.weight.mode: unknown mode '" + name + "'");
  }
  with_path("$.weight", [&] { return spec.weight(); });

  if (const auto it = doc.find("window"); it != doc.end()) {
    const std::string path = "$.window";
    GridSpec g;
    g.x_min = number(field(*it, "x_min", path), path + ".x_min");
    g.x_max = number(field(*it, "x_max", path), path + ".x_max");
    g.y_min = number(field(*it, "y_min", path), path + ".y_min");
    g.y_max = number(field(*it, "y_max", path), path + ".y_max");
    g.nx = integer(field(*it, "nx", path), path + ".nx");
    g.ny = integer(field(*it, "ny", path), path + ".ny");
    with_path(path, [&] {
      g.validate();
      return 0;
    });
    spec.window = g;
  }
  if (const auto it = doc.find("epsilons"); it != doc.end()) {
    spec.epsilons = number_list(*it, "$.epsilons");
    for (size_t k = 0; k < spec.epsilons.size(); ++k) {
      if (!(spec.epsilons[k] > 0.0)) throw_parse("$.epsilons[" + std::to_string(k) + "]: must be positive");
    }
  }
  return spec;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read input file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const ProblemSpec& spec) {
  const MatrixPolynomial& p = spec.polynomial;
  json doc;
  doc["n"] = p.n();
  doc["m"] = p.degree();
  json coeffs = json::array();
  for (const auto& c : p.coeffs()) coeffs.push_back({{"re", matrix_json(c.real())}, {"im", matrix_json(c.imag())}});
  doc["coefficients"] = std::move(coeffs);

  json weight{{"mode", to_string(spec.weight_mode)}};
  if (spec.weight_mode == WeightMode::kConstant) weight["value"] = spec.weight_values.front();
  if (spec.weight_mode == WeightMode::kCustom) weight["coefficients"] = spec.weight_values;
  doc["weight"] = std::move(weight);

  if (spec.window) {
    const GridSpec& g = *spec.window;
    doc["window"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
                     {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
  }
  if (!spec.epsilons.empty()) doc["epsilons"] = spec.epsilons;
  return doc.dump(2) + "\n";
}

}  // namespace polyspectra
