#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtgae {

/// Malformed input text (edge lists, feature files, label files, configs).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Training produced a non-finite loss.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double last_finite_loss)
      : std::runtime_error(what), last_finite_loss_(last_finite_loss) {}

  double last_finite_loss() const { return last_finite_loss_; }

 private:
  double last_finite_loss_;
};

/// A stored artifact (checkpoint, split manifest) is corrupt or does not
/// match the dataset it is being used with.
class ArtifactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtgae
