#pragma once

#include <stdexcept>
#include <string>

namespace rgvi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite data, dimension mismatch, infeasible point, violated precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An inner solve (prox, auxiliary CVI, tensor subproblem) did not reach its tolerance.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The essential-step condition <g, v - T> > 0 failed for a non-stationary point.
class CutViolation : public Error {
 public:
  CutViolation(const std::string& what, double inner_product)
      : Error(what), inner_product_(inner_product) {}
  double inner_product() const noexcept { return inner_product_; }

 private:
  double inner_product_;
};

// Requested evaluation mode or problem combination that the library cannot handle.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Bad regularization / missing constant for a step or method.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// A theorem inequality asserted online was violated beyond its tolerance budget.
class TheoremViolation : public Error {
 public:
  TheoremViolation(const std::string& what, int iteration, double excess)
      : Error(what), iteration_(iteration), excess_(excess) {}
  int iteration() const noexcept { return iteration_; }
  double excess() const noexcept { return excess_; }

 private:
  int iteration_;
  double excess_;
};

}  // namespace rgvi
