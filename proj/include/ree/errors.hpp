#pragma once

#include <stdexcept>
#include <string>

namespace ree {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or subsystem-dimension mismatch.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid argument value (parameter out of range, bad family name, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Matrix fails a positivity requirement.
class NotPsdError : public Error {
 public:
  using Error::Error;
};

// Candidate density matrix violates a state invariant. Carries which
// invariant failed and by how much (for PSD failures the deviation is the
// most negative eigenvalue).
class NotAStateError : public Error {
 public:
  NotAStateError(const std::string& what, std::string invariant, double deviation)
      : Error(what), invariant_(std::move(invariant)), deviation_(deviation) {}
  const std::string& invariant() const { return invariant_; }
  double deviation() const { return deviation_; }

 private:
  std::string invariant_;
  double deviation_;
};

// supp(rho) is not contained in supp(sigma), so quantities defined through
// log(sigma) on the support of rho do not exist.
class SupportError : public Error {
 public:
  using Error::Error;
};

// Singular matrix where a strictly positive one is required.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Malformed state file or report input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace ree
