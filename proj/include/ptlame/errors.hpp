#ifndef PTLAME_ERRORS_HPP
#define PTLAME_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace ptlame {

/// Argument outside the domain of a function (e.g. m outside (0,1)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation point too close to a pole (or to a zero of a denominator).
/// Carries the offending lattice point.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, std::complex<double> point)
      : std::runtime_error(what), point_(point) {}
  std::complex<double> point() const noexcept { return point_; }

 private:
  std::complex<double> point_;
};

/// Iterative method failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// ODE integration failed (step underflow, Wronskian drift).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No sign choice of a multi-branch formula satisfies its selection rule.
class BranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid potential description.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ptlame

#endif  // PTLAME_ERRORS_HPP
