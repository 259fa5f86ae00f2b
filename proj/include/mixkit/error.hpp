#pragma once

#include <stdexcept>
#include <string>

namespace mixkit {

// Precondition or contract violation on in-memory values (bad dimensions,
// out-of-bounds regions, missing heatmaps, invalid scale bounds).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Filesystem or codec failure. The message always names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DecodeError : public IoError {
 public:
  using IoError::IoError;
};

// Malformed dataset manifest; message carries the line number.
class ManifestError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace mixkit
