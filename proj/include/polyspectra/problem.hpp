#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polyspectra/pseudospectrum.hpp"

namespace polyspectra {

enum class WeightMode { kConstant, kUnit, kCoefficientNorms, kCustom };

const char* to_string(WeightMode mode);

/// One input document: polynomial, how its weight is chosen, and optional
/// grid and ε list.
struct ProblemSpec {
  MatrixPolynomial polynomial;
  WeightMode weight_mode = WeightMode::kUnit;
  std::vector<double> weight_values;  // {w_0} for constant mode, the full list for custom mode
  std::optional<GridSpec> window;
  std::vector<double> epsilons;

  WeightPolynomial weight() const;
};

/// Parses the JSON problem format. Errors carry the offending field path.
ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem(const std::string& path);

/// Canonical text: keys sorted, two-space indent, trailing newline.
std::string serialize_problem(const ProblemSpec& spec);

}  // namespace polyspectra
