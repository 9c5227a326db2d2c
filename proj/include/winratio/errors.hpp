#pragma once

#include <stdexcept>

namespace winratio {

// Invalid configuration (bad probabilities, mixtures, unknown JSON keys).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed data handed to an estimator (nonpositive times, wrong payload).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The data are valid but carry no information for the requested statistic
// (all ties, zero permutation variance, constant rank sums, separation).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace winratio
