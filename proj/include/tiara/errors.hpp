#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tiara {

/// A precondition on a numeric argument was violated (index out of range,
/// bad threshold ordering, non-finite input, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The (kappa, eta, a_min) triple admits no finite non-negative alpha.
class InfeasibleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Malformed text input. `line` is 1-based, 0 when not line-oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-level failure. `offset` is the byte position where reading stopped.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what, std::uint64_t offset = 0)
      : std::runtime_error(what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace tiara
