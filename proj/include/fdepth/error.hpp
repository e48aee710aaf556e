// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_ERROR_HPP
#define FDEPTH_ERROR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fdepth {

/// Base of every error the library throws. Callers that only need to know
/// "this input was rejected" catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input. `where()` is the file name plus a 1-based line number or
/// a byte offset, whichever applies to the format.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, const std::string& location,
             const std::string& cause)
      : Error(file + ":" + location + ": " + cause),
        file_(file),
        location_(location),
        cause_(cause) {}

  static ParseError at_line(const std::string& file, std::size_t line,
                            const std::string& cause) {
    return ParseError(file, "line " + std::to_string(line), cause);
  }
  static ParseError at_offset(const std::string& file, std::uint64_t offset,
                              const std::string& cause) {
    return ParseError(file, "byte " + std::to_string(offset), cause);
  }

  const std::string& file() const noexcept { return file_; }
  const std::string& location() const noexcept { return location_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string file_;
  std::string location_;
  std::string cause_;
};

class BadMagic : public ParseError {
 public:
  explicit BadMagic(const std::string& file)
      : ParseError(file, "byte 0", "bad magic, expected FDPC") {}
};

class UnsupportedMaxval : public ParseError {
 public:
  UnsupportedMaxval(const std::string& file, long maxval)
      : ParseError(file, "header",
                   "unsupported maxval " + std::to_string(maxval) +
                       ", expected 65535") {}
};

class RleLengthMismatch : public ParseError {
 public:
  RleLengthMismatch(const std::string& file, std::size_t line,
                    std::size_t decoded, std::size_t expected)
      : ParseError(file, "line " + std::to_string(line),
                   "mask_rle decodes to " + std::to_string(decoded) +
                       " cells, bbox has " + std::to_string(expected)) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidRotation : public Error {
 public:
  using Error::Error;
};

class InvalidIntrinsics : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidFraction : public Error {
 public:
  using Error::Error;
};

class InvalidRoi : public Error {
 public:
  using Error::Error;
};

class InvalidPolicy : public Error {
 public:
  using Error::Error;
};

/// An estimator had no nonzero depth to work with.
class NoValidData : public Error {
 public:
  using Error::Error;
};

/// The center pixel of the ROI holds no depth.
class NoData : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace fdepth

#endif  // FDEPTH_ERROR_HPP
