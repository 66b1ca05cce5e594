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

#include "bornforge/bits.hpp"

#include "bornforge/errors.hpp"

namespace bornforge {

std::string to_bitstring(Bits x, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int k = 0; k < n; ++k) {
    if (bit_of(x, k)) s[static_cast<std::size_t>(k)] = '1';
  }
  return s;
}

Bits parse_bitstring(std::string_view s) {
  if (s.size() > 64) throw ShapeError("bitstring longer than 64 characters");
  Bits x = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '1') {
      x |= Bits{1} << k;
    } else if (s[k] != '0') {
      throw ShapeError("invalid bitstring '" + std::string(s) + "'");
    }
  }
  return x;
}

}  // namespace bornforge
