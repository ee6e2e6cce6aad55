#pragma once

#include <stdexcept>
#include <string>

namespace zetares {

// Memory or enumeration budget exceeded.
class resource_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Grid or quadrature step too coarse for the integrand's fastest phase.
class resolution_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Requested accuracy unattainable at working precision; carries the
// estimate that was actually achieved.
class accuracy_error : public std::runtime_error {
public:
  accuracy_error(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

// Evaluation point too close to a zero of the function in the denominator.
class near_zero_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Euler product or geometric series with ratio >= 1.
class divergence_error : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// No admissible value exists; names the binding constraint.
class infeasible_error : public std::runtime_error {
public:
  infeasible_error(const std::string& what, std::string binding)
      : std::runtime_error(what), binding_(std::move(binding)) {}
  const std::string& binding_constraint() const noexcept { return binding_; }

private:
  std::string binding_;
};

// Metropolis chain accepted no proposal over the whole run.
class sampler_stall_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace zetares
