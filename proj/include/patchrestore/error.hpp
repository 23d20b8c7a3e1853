#pragma once

#include <stdexcept>
#include <string>

namespace patchrestore {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of two images, patches or vectors disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A patch or sample index lies outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its budget or stagnated.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Conjugate gradient met a direction with p'Ap <= 0.
class IndefiniteOperator : public Error {
 public:
  IndefiniteOperator(const std::string& what, int iteration, double curvature)
      : Error(what), iteration_(iteration), curvature_(curvature) {}
  int iteration() const { return iteration_; }
  double curvature() const { return curvature_; }

 private:
  int iteration_;
  double curvature_;
};

}  // namespace patchrestore
