// Copyright 2026 The pose3d Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POSE3D_ERROR_HPP_
#define POSE3D_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pose3d {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents are invalid or incompatible with an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Reduction axes are duplicated or out of range.
class AxisError : public Error {
 public:
  using Error::Error;
};

/// Architecture, training or run configuration is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or otherwise unusable numeric input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents (bad magic, unparsable header, bad CSV row).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A weights file does not fit the architecture it is loaded against.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

/// A file ended before its declared payload.
class TruncatedError : public Error {
 public:
  using Error::Error;
};

/// Missing or inconsistent data on disk or in memory.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t epoch)
      : Error(what), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace pose3d

#endif  // POSE3D_ERROR_HPP_
