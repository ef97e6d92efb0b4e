#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace polyspectra {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Eigen::Index;

// Failure categories. The CLI maps them onto its exit codes.
enum class ErrorKind {
  kParse,         // malformed input documents
  kNumerical,     // singular leading coefficient, budget exhausted, no convergence
  kPrecondition,  // caller violated an operation's precondition
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_numerical(const std::string& what) {
  throw Error(ErrorKind::kNumerical, what);
}

[[noreturn]] inline void throw_precondition(const std::string& what) {
  throw Error(ErrorKind::kPrecondition, what);
}

[[noreturn]] inline void throw_parse(const std::string& what) {
  throw Error(ErrorKind::kParse, what);
}

}  // namespace polyspectra
