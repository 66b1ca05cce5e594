// Copyright 2026 The Bornforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bornforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested size exceeds what dense simulation (or an oracle) supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Dimension or length mismatch between inputs.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An API was called outside its contract (e.g. shifting a frozen parameter).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A score function was requested at a point where it is not defined.
class ScoreUndefinedError : public Error {
 public:
  using Error::Error;
};

/// A linear-algebra or iterative routine failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. The message names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace bornforge
