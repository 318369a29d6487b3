#pragma once

#include <stdexcept>
#include <string>

namespace qpfe {

/// Input that does not conform to a file format or schema. CLI exit code 3.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Enumeration or state-vector size beyond the configured cap. CLI exit 4.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qpfe
