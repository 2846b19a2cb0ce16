#pragma once

#include <stdexcept>
#include <string>

namespace lbandit {

/// Bad argument: wrong shape, out-of-range parameter, non-finite value.
class invalid_input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// KL divergence is infinite (q puts mass where p has none).
class divergence_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A bound's parameter constraint does not hold, e.g. lambda2 > m * b_min.
class constraint_violation_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Non-finite intermediate value inside a sampler or optimizer.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lbandit
