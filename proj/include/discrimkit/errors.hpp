#pragma once

#include <stdexcept>
#include <string>

namespace discrimkit {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input (bad dimensions, invalid probabilities,
// unparseable files). Maps to CLI exit code 2.
class invalid_input : public error {
 public:
  explicit invalid_input(const std::string& msg) : error(msg) {}
};

// A numerical routine failed to deliver its contract (non-convergence,
// loss of positivity beyond tolerance). Maps to CLI exit code 3.
class numerical_error : public error {
 public:
  explicit numerical_error(const std::string& msg) : error(msg) {}
};

}  // namespace discrimkit
