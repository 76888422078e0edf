#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgauss {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Every module reports contract problems through one of
// these so the CLI can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeLimitError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ModeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        message_(what), position_(position) {}

  std::size_t position() const { return position_; }
  // Description without the position suffix.
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

// Largest state-space dimension accepted for dense vectors. Defaults to 2^24
// and can be overridden with QGAUSS_MAX_DIM.
std::size_t max_vector_dim();

// Full-basis verification cap (2^14 by default, never above max_vector_dim()).
std::size_t max_verify_dim();

// Dense matrix cap used for eigendecompositions (2^12 by default).
std::size_t max_dense_dim();

inline constexpr double kRelationTolerance = 1e-12;

}  // namespace qgauss
