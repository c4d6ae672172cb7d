#pragma once

#include <stdexcept>
#include <string>

namespace stabreg {

// Raised for malformed or inconsistent input documents (networks, rate
// models, scenarios). The message carries the offending path or field.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a run cannot continue (controller handed back a bad phase,
// internal bookkeeping went inconsistent, iteration caps hit).
struct SimError : std::runtime_error {
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stabreg
