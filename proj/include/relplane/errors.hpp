#ifndef RELPLANE_ERRORS_HPP_
#define RELPLANE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace relplane {

// Malformed input bytes (bad JSON, bad config syntax).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& m) : std::runtime_error(m) {}
};

// Structurally valid input violating a data invariant (span bounds,
// misaligned tags, bad shapes at module boundaries).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& m) : std::runtime_error(m) {}
};

// Labels or symbols outside the declared schema.
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& m) : std::runtime_error(m) {}
};

// Inconsistent experiment configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

// Non-finite loss during optimization.
struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace relplane

#endif  // RELPLANE_ERRORS_HPP_
