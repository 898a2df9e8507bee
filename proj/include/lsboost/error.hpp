#pragma once

#include <stdexcept>
#include <string>

namespace lsboost {

// Error categories map one-to-one onto CLI exit codes (usage 2, data 3, oracle 4).
enum class ErrorKind { Usage, Data, Oracle };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

// Raised when a weak learner fails or the algorithm's contract is violated.
class OracleError : public Error {
 public:
  explicit OracleError(const std::string& what) : Error(ErrorKind::Oracle, what) {}
};

}  // namespace lsboost
