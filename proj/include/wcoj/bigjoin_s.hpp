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

#include <unordered_map>
#include <vector>

#include "wcoj/bigjoin.hpp"
#include "wcoj/index.hpp"
#include "wcoj/runtime.hpp"

namespace wcoj::bigjoin_s {

/// Slice [start, end) of the candidate extensions of `prefix` in
/// Ext^{min_relation}, owned by the worker holding the quad.
struct BalancedQuad {
  Prefix prefix;
  RelationId min_relation = kNoRelation;
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
};

/// Groups lookups by key so each distinct key is requested once. Slots are
/// numbered in first-seen order.
class LookupBatch {
 public:
  /// Registers `requester` under `key`; returns the key's slot.
  std::uint32_t add(const Tuple& key, std::uint32_t requester);

  std::size_t size() const { return keys_.size(); }
  const Tuple& key(std::uint32_t slot) const { return keys_[slot]; }
  const std::vector<std::uint32_t>& requesters(std::uint32_t slot) const {
    return requesters_[slot];
  }
  /// Lookups registered before aggregation.
  std::size_t registered() const { return registered_; }

 private:
  std::unordered_map<Tuple, std::uint32_t, TupleHash, TupleEqual> slots_;
  std::vector<Tuple> keys_;
  std::vector<std::vector<std::uint32_t>> requesters_;
  std::size_t registered_ = 0;
};

struct BalanceSlice {
  WorkerId receiver = 0;
  /// Index into the sender's triples.
  std::size_t triple = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  bool operator==(const BalanceSlice&) const = default;
};

/// Greedy split of one sender's work (`counts[t]` extensions for triple t)
/// into `workers` shares of total/workers, the first total % workers
/// receivers taking one extra. Receivers are visited from (sender + 1) mod w.
std::vector<BalanceSlice> balance_split(const std::vector<std::size_t>& counts, WorkerId sender,
                                        std::size_t workers);

/// Split of a global work range of `total` units into `workers` contiguous
/// shares (the first total % workers, visited from `first_receiver`, take one
/// extra). The sender's counts occupy [offset, offset + sum(counts)); returns
/// the sender's pieces of each share.
std::vector<BalanceSlice> balance_split(const std::vector<std::size_t>& counts,
                                        std::size_t offset, std::size_t total,
                                        std::size_t workers, WorkerId first_receiver);

struct RunStats {
  std::uint64_t steps = 0;
  /// Peak BalancedQuads stored at one level, summed over workers.
  std::uint64_t max_level_quads = 0;
  /// Peak candidates held, summed over workers.
  std::uint64_t max_queued_candidates = 0;
  std::uint64_t outputs = 0;
  /// Lookups before and after per-key aggregation.
  std::uint64_t lookups_registered = 0;
  std::uint64_t requests_sent = 0;
  /// Largest |assigned - mean| over workers in any balance round.
  double max_balance_deviation = 0;
  gj::Stats probes;
};

struct BalancedResult {
  std::vector<WeightedTuple> tuples;
  RunStats stats;
  CostLedger ledger;

  Metrics metrics() const { return report(ledger); }
  std::vector<Tuple> sorted_tuples() const;
};

/// BiGJoin-S over skew-resilient index triples, seeded with P_0 = {()}.
BalancedResult run_static_balanced(const Query& q, const Database& db,
                                   const WorkerConfig& config);

}  // namespace wcoj::bigjoin_s
