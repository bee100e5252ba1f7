// Copyright 2026 The mot3d Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace mot3d {

// Base for every error raised by the library. The CLI maps NumericalError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent noise model / calibration input.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Frames delivered out of order or twice.
class SequencingError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Factorization failure. Carries a reciprocal condition estimate of the
// offending matrix (0 when it could not be computed).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double rcond)
      : Error(what), rcond_(rcond) {}

  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

}  // namespace mot3d
