// Copyright 2026 The cpestab Authors
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

namespace cpe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad dimensions, negative rates, mismatched layouts.
struct InvalidArgument : Error {
  using Error::Error;
};

// Density matrix fails trace or hermiticity checks.
struct InvalidState : Error {
  using Error::Error;
};

// Non-unitary exponential, diverging iteration, negative eigenvalue drift.
struct NumericalError : Error {
  using Error::Error;
};

// Population leaked onto the padded levels.
struct TruncationError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace cpe
