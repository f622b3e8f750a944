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

#include <vector>

#include "wcoj/index.hpp"
#include "wcoj/relcore.hpp"

namespace wcoj {

/// Extension views indexed [relation][rank].
using ViewTable = std::vector<std::vector<const ExtensionView*>>;

/// A bound prefix in global order with the multiplicity it carries.
struct Prefix {
  Tuple values;
  Weight weight = 1;
};

/// P_j: every member has the same length j.
using PrefixSet = std::vector<Prefix>;

}  // namespace wcoj

namespace wcoj::gj {

/// Index operation counters. A probe is one count read, one proposed
/// candidate, or one membership test.
struct Stats {
  std::uint64_t count_reads = 0;
  std::uint64_t proposals = 0;
  std::uint64_t membership_probes = 0;
  /// Prefixes whose probes exceeded n * min_count + n.
  std::uint64_t smallest_first_violations = 0;

  std::uint64_t probes() const { return count_reads + proposals + membership_probes; }
  Stats& operator+=(const Stats& o);
};

/// Extends P_j to P_{j+1}: for each prefix, proposes candidates from the
/// relation with the fewest extensions (ties to the lowest relation id) and
/// keeps those present in every other relation binding the next attribute.
/// Throws MissingIndex when a binding relation has no view at the needed rank.
PrefixSet extend_level(const QueryPlan& plan, const ViewTable& views, const PrefixSet& level,
                       Stats* stats = nullptr);

struct RunOptions {
  /// Keep P_0 .. P_m in the result.
  bool keep_levels = false;
};

struct RunResult {
  /// Output tuples in attribute-id order, with multiplicities.
  std::vector<WeightedTuple> tuples;
  Stats stats;
  std::vector<PrefixSet> levels;

  /// Flat tuples (weights ignored), sorted.
  std::vector<Tuple> sorted_tuples() const;
};

/// Runs GJ from `seeds` (all of one length s) through level m.
RunResult run_from(const QueryPlan& plan, const ViewTable& views, PrefixSet seeds,
                   const RunOptions& options = {});

/// Serial Generic Join over static set-semantics indices, starting from P_0 = {()}.
RunResult run(const Query& q, const Database& db, const RunOptions& options = {});

}  // namespace wcoj::gj
