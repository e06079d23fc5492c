#pragma once

#include <stdexcept>
#include <string>

namespace levyrisk {

// Invalid user-supplied values: bad parameters, malformed scenario files,
// mismatched grids, out-of-domain arguments.
class invalid_input : public std::invalid_argument {
 public:
  explicit invalid_input(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally unsupported model, e.g. a heavy-tailed claim law fed to the
// Laplace-transform machinery, or an overshoot law requested for a model
// without claim jumps.
class model_error : public std::domain_error {
 public:
  explicit model_error(const std::string& what) : std::domain_error(what) {}
};

// A numeric procedure failed: a root bracket could not be established, an
// iteration did not converge, or a result came out non-finite.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levyrisk
