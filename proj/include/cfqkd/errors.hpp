#pragma once

#include <stdexcept>
#include <string>

namespace cfqkd {

// Bad user-supplied configuration (reflectivity out of range, missing
// strategy parameter, malformed input file). Maps to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A value failed a structural invariant (non-normalized state, dimension
// mismatch). Maps to exit code 1 in the CLI.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Broken internal assumption (e.g. sampling from an empty tree).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cfqkd
