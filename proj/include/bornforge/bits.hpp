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

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

namespace bornforge {

/// A computational basis index. Qubit k is bit k (qubit 0 is the least
/// significant bit); bit value 0 corresponds to the Z eigenvalue +1.
using Bits = std::uint64_t;

inline int bit_of(Bits x, int k) { return static_cast<int>((x >> k) & 1U); }

/// z_k = (-1)^{x_k}
inline int z_of(Bits x, int k) { return 1 - 2 * bit_of(x, k); }

inline Bits toggle(Bits x, int k) { return x ^ (Bits{1} << k); }

inline int hamming_distance(Bits x, Bits y) { return std::popcount(x ^ y); }

inline Bits all_ones(int n) { return n >= 64 ? ~Bits{0} : (Bits{1} << n) - 1; }

/// Text form: character k is the value of qubit k, so qubit 0 is leftmost.
std::string to_bitstring(Bits x, int n);

/// Inverse of to_bitstring. Throws ShapeError on characters other than 0/1.
Bits parse_bitstring(std::string_view s);

/// A bitstring that carries its own length, used where lengths must agree.
struct Bitstring {
  Bits bits = 0;
  int n = 0;

  static Bitstring parse(std::string_view s) {
    return {parse_bitstring(s), static_cast<int>(s.size())};
  }
  std::string str() const { return to_bitstring(bits, n); }
  bool operator==(const Bitstring&) const = default;
};

}  // namespace bornforge
