// Copyright 2026 The clonegame Authors
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

#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace clonegame {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char *kind() const noexcept { return "error"; }
};

/// A caller broke a documented precondition (bad argument, wrong flag, ...).
class ContractError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "contract"; }
};

/// Register labels collide, are missing, or disagree in dimension.
class LayoutError : public ContractError {
 public:
  using ContractError::ContractError;
  const char *kind() const noexcept override { return "layout"; }
};

/// A dense object would exceed the configured dimension cap.
class ResourceError : public Error {
 public:
  using Error::Error;
  const char *kind() const noexcept override { return "resource"; }
};

inline constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 14;

/// Largest total Hilbert-space dimension any dense operator or vector may
/// have. `CLONEGAME_MAX_DIM` overrides the default of 2^14.
inline std::size_t max_dimension() {
  if (const char *env = std::getenv("CLONEGAME_MAX_DIM"); env != nullptr && *env != '\0') {
    char *end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultMaxDimension;
}

inline void check_dimension(std::size_t dim, const char *what) {
  if (dim > max_dimension()) {
    throw ResourceError(std::string(what) + ": total dimension " + std::to_string(dim) +
                        " exceeds the cap of " + std::to_string(max_dimension()));
  }
}

}  // namespace clonegame
