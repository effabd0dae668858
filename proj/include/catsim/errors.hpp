#pragma once

#include <stdexcept>
#include <string>

namespace catsim {

// Fock cutoff too small for the requested state or displacement.
class CutoffError : public std::runtime_error {
 public:
  explicit CutoffError(const std::string& what) : std::runtime_error(what) {}
};

// Integrator failure: trace drift, bad step size, non-finite values.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// Bad run configuration, fit spec, or input file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace catsim
