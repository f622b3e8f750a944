// Copyright 2026 The wcoj Authors
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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wcoj {

/// Opaque attribute value. Graph vertices are values.
using Value = std::uint64_t;
/// Signed multiplicity of a tuple (+1 insert, -1 delete).
using Weight = std::int64_t;
/// Logical time.
using Timestamp = std::uint64_t;

using AttributeId = std::uint32_t;
/// Zero-based position of an atom in the query body (R_1 is 0).
using RelationId = std::uint32_t;
using WorkerId = std::uint32_t;

using Tuple = std::vector<Value>;
using KeyView = std::span<const Value>;

inline constexpr RelationId kNoRelation = static_cast<RelationId>(-1);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WCOJ_DEFINE_ERROR(Name)          \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

WCOJ_DEFINE_ERROR(DanglingAttribute);
WCOJ_DEFINE_ERROR(BadOrder);
WCOJ_DEFINE_ERROR(ArityMismatch);
WCOJ_DEFINE_ERROR(RangeError);
WCOJ_DEFINE_ERROR(MissingIndex);
WCOJ_DEFINE_ERROR(StaleTimestamp);
WCOJ_DEFINE_ERROR(FrontierRegression);
WCOJ_DEFINE_ERROR(ResolverMiss);
WCOJ_DEFINE_ERROR(UnknownRelation);
WCOJ_DEFINE_ERROR(NotFactorizable);
WCOJ_DEFINE_ERROR(ScaleGuard);
WCOJ_DEFINE_ERROR(ParseError);

#undef WCOJ_DEFINE_ERROR

/// Raised by the query parser; carries the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// ---------------------------------------------------------------------------
// Hashing
// ---------------------------------------------------------------------------

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded hash of a value sequence. Routing in the runtime and all hash
/// containers in the library go through this function.
inline std::uint64_t hash_values(KeyView values, std::uint64_t seed = 0) noexcept {
  std::uint64_t h = mix64(seed ^ 0x51ed270b27a6c5f3ULL);
  for (Value v : values) h = mix64(h ^ mix64(v));
  return mix64(h ^ values.size());
}

struct TupleHash {
  using is_transparent = void;
  std::size_t operator()(KeyView t) const noexcept { return hash_values(t); }
  std::size_t operator()(const Tuple& t) const noexcept { return hash_values(t); }
};

struct TupleEqual {
  using is_transparent = void;
  bool operator()(KeyView a, KeyView b) const noexcept {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
  }
};

}  // namespace wcoj
