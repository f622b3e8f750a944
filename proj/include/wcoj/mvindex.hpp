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

#include "wcoj/index.hpp"
#include "wcoj/relcore.hpp"

namespace wcoj {

struct VersionedEntry {
  Value value = 0;
  Weight weight = 0;
  bool operator==(const VersionedEntry&) const = default;
};

/// Ascending by value; zero-weight entries suppressed.
using VersionedQueryResult = std::vector<VersionedEntry>;

/// Signed-weight, timestamped adjacency index. An update's tuple is
/// (key..., value). Data lives in three regions:
///
///   uncommitted  updates with time >= frontier, kept ordered by time
///   uncompacted  committed updates, an append-only log per key
///   compacted    committed updates merged per key, consolidated by
///                (value, time) so reads at any past time stay exact
///
/// A key's log is merged into its compacted run once the log grows past
/// twice the key's distinct-value count.
class MultiVersionIndex {
 public:
  MultiVersionIndex() = default;

  /// Appends to the uncommitted region. Throws StaleTimestamp if any update is
  /// older than the frontier (the batch is then rejected as a whole).
  void ingest(std::span<const SignedUpdate> updates);

  /// Commits every update with time < new_frontier. Throws FrontierRegression.
  void advance(Timestamp new_frontier);

  /// Merges every key's log into its compacted run.
  void compact();

  /// Accumulation over all updates with time <= `time`.
  VersionedQueryResult query_at(KeyView key, Timestamp time) const;
  /// Accumulation over all updates with time < `time`.
  VersionedQueryResult query_before(KeyView key, Timestamp time) const;

  Timestamp frontier() const { return frontier_; }

  std::size_t uncommitted_size() const { return uncommitted_.size(); }
  std::size_t uncompacted_size() const;
  std::size_t compacted_size() const;
  std::size_t num_keys() const { return committed_.size(); }
  /// Stored updates per key, for memory accounting.
  template <class F>
  void for_each_key(F&& f) const {
    for (const auto& [key, state] : committed_) f(key, state.compacted.size() + state.log.size());
    for (const auto& [key, positions] : uncommitted_by_key_) f(key, positions.size());
  }

  /// Number of (key, value) accumulations found negative while compacting.
  /// Zero on well-formed streams.
  std::uint64_t negative_weight_events() const { return negative_events_; }
  std::uint64_t compactions() const { return compactions_; }

 private:
  struct Update {
    Value value;
    Timestamp time;
    Weight weight;
  };
  struct KeyState {
    std::vector<Update> compacted;  // sorted by (value, time), no zero weights
    std::vector<Update> log;
    std::size_t distinct_values = 0;
  };

  VersionedQueryResult accumulate(KeyView key, Timestamp bound, bool inclusive) const;
  void compact_key(KeyState& state);
  void rebuild_uncommitted_index();

  Timestamp frontier_ = 0;
  std::unordered_map<Tuple, KeyState, TupleHash, TupleEqual> committed_;
  std::vector<SignedUpdate> uncommitted_;
  std::unordered_map<Tuple, std::vector<std::size_t>, TupleHash, TupleEqual> uncommitted_by_key_;
  std::uint64_t negative_events_ = 0;
  std::uint64_t compactions_ = 0;
};

/// ExtensionView over a MultiVersionIndex at a fixed time. Reads are cached
/// per key, so the view must not outlive a change to the index.
class VersionedView final : public ExtensionView {
 public:
  VersionedView(const MultiVersionIndex& index, Timestamp time, bool inclusive)
      : index_(&index), time_(time), inclusive_(inclusive) {}

  std::size_t count(KeyView key) const override { return lookup(key).size(); }
  Weight multiplicity(KeyView key, Value value) const override;
  void enumerate(KeyView key, std::size_t from, std::size_t to, std::vector<Value>& values,
                 std::vector<Weight>* weights) const override;

 private:
  const VersionedQueryResult& lookup(KeyView key) const;

  const MultiVersionIndex* index_;
  Timestamp time_;
  bool inclusive_;
  mutable std::unordered_map<Tuple, VersionedQueryResult, TupleHash, TupleEqual> cache_;
};

}  // namespace wcoj
