#pragma once

#include <stdexcept>
#include <string>

namespace autoids {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (bad CSV records, wrong field counts, bad numerics).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Filesystem / stream failures while reading or writing.
class IoError : public Error {
 public:
  using Error::Error;
};

// Persisted artifacts that cannot be used: bad magic, version or kind
// mismatch, checksum failure, incompatible transform hashes.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

// Invalid arguments or dimension mismatches at API boundaries.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace autoids
