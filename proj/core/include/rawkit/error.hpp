#pragma once

#include <stdexcept>
#include <string>

namespace rawkit {

// Broken type invariant or inconsistent arguments.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input document (annotation JSON, sidecar, PNG structure, ...).
// The message carries entity context, e.g. "annotations[3]: unknown image_id 99".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem-level failure (missing file, short read, ...).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rawkit
