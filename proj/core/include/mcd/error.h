#ifndef MCD_ERROR_H_
#define MCD_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcd {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Argument outside an operation's domain (unknown action, nonpositive delay...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Unsatisfiable generator or solver configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition on mutable state, e.g. absorbing
// the same user twice.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration larger than the configured limit.
class RefusalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcd

#endif  // MCD_ERROR_H_
