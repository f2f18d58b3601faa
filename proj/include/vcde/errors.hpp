#pragma once

#include <stdexcept>
#include <string>

namespace vcde {

// Failure of a numerical routine (factorization, overflow) that is not a
// caller bug.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative solver exhausted its iteration budget; carries the last
// gradient max-norm for diagnostics.
class convergence_error : public numerical_error {
public:
  convergence_error(const std::string& what, double grad_norm)
      : numerical_error(what), grad_norm_(grad_norm) {}
  double grad_norm() const { return grad_norm_; }

private:
  double grad_norm_;
};

}  // namespace vcde
