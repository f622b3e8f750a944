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
#include <string>
#include <vector>

#include "wcoj/front.hpp"
#include "wcoj/relcore.hpp"
#include "wcoj/testkit.hpp"

namespace wcoj::test {

inline Query named(const std::string& name) {
  return front::parse_query(front::standard_query(name));
}

inline Relation edges(std::vector<Tuple> ts) {
  Relation r;
  r.tuples = std::move(ts);
  return r;
}

inline std::vector<std::vector<AttributeId>> all_orders(std::size_t m) {
  std::vector<AttributeId> order(m);
  for (AttributeId a = 0; a < m; ++a) order[a] = a;
  std::vector<std::vector<AttributeId>> out;
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

inline std::vector<WeightedTuple> sorted(std::vector<WeightedTuple> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace wcoj::test
