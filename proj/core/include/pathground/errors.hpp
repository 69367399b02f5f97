#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pathground {

/// Invalid domain value (bad box, malformed annotation, broken invariant).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inconsistent or unsupported configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Remote knowledge provider failure (network, non-2xx, empty response).
struct ProviderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Prediction set does not match the ground truth one-to-one. Carries the
/// exhaustive offender lists so callers can report every problem at once.
struct EvalInputError : std::runtime_error {
  std::vector<std::string> missing;
  std::vector<std::string> duplicates;
  std::vector<std::string> unknown;

  EvalInputError(const std::string& msg, std::vector<std::string> missing_ids,
                 std::vector<std::string> duplicate_ids,
                 std::vector<std::string> unknown_ids)
      : std::runtime_error(msg),
        missing(std::move(missing_ids)),
        duplicates(std::move(duplicate_ids)),
        unknown(std::move(unknown_ids)) {}
};

}  // namespace pathground
