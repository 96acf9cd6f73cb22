#pragma once

#include <stdexcept>
#include <string>

namespace ebtest {

/// Argument outside the mathematical domain of a function (e.g. xi(u) with u <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or invalid user input: non-finite data, bad regime, unparseable file.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric solver could not bracket or converge to its root.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ebtest
