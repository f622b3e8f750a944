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

#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wcoj/relcore.hpp"

namespace wcoj {

/// Read interface over one extension index Ext^i at a fixed rank: maps a key
/// (the relation's already-bound attribute values) to the set of values of
/// the next attribute. Static and multi-version indices both implement it.
class ExtensionView {
 public:
  virtual ~ExtensionView() = default;

  virtual std::size_t count(KeyView key) const = 0;
  /// Accumulated weight of `value` under `key`; 0 when absent.
  virtual Weight multiplicity(KeyView key, Value value) const = 0;
  /// Appends the half-open slice [from, to) of the ascending extension list.
  /// `weights` may be null.
  virtual void enumerate(KeyView key, std::size_t from, std::size_t to,
                         std::vector<Value>& values, std::vector<Weight>* weights) const = 0;

  bool contains(KeyView key, Value value) const { return multiplicity(key, value) != 0; }
};

/// Maps a query atom onto the columns of its stored relation under a global
/// attribute order. Two atoms with equal layouts share one physical index,
/// so an edge relation needs at most a forward and a reverse instance.
struct IndexLayout {
  std::string source;
  std::size_t source_arity = 0;
  /// columns[t] is the source column holding the rank-t attribute.
  std::vector<std::size_t> columns;
  /// Column pairs that must hold equal values (repeated attributes).
  std::vector<std::pair<std::size_t, std::size_t>> equalities;

  auto operator<=>(const IndexLayout&) const = default;
};

IndexLayout layout_for(const QueryPlan& plan, RelationId i);

/// Applies the layout's selection and column permutation. Returns nullopt when
/// the tuple fails an equality. Throws ArityMismatch on a wrongly sized tuple.
std::optional<Tuple> project(const IndexLayout& layout, const Tuple& source_tuple);

/// Static extension index for one rank: hash map from key to an ascending
/// value list plus a hash set for constant-time membership.
class ExtensionIndex final : public ExtensionView {
 public:
  struct Entry {
    std::vector<Value> values;
    std::unordered_set<Value> members;
  };
  using Map = std::unordered_map<Tuple, Entry, TupleHash, TupleEqual>;

  explicit ExtensionIndex(std::size_t rank = 0) : rank_(rank) {}

  std::size_t rank() const { return rank_; }

  /// Inserts (key, value); duplicates are ignored. Call seal() afterwards.
  void insert(KeyView key, Value value);
  /// Sorts every value list.
  void seal();

  std::size_t count(KeyView key) const override;
  Weight multiplicity(KeyView key, Value value) const override;
  void enumerate(KeyView key, std::size_t from, std::size_t to, std::vector<Value>& values,
                 std::vector<Weight>* weights) const override;

  /// Slice [from, to) of the ascending extension list; RangeError on bad bounds.
  std::vector<Value> enumerate(KeyView key, std::size_t from, std::size_t to) const;
  const std::vector<Value>* find(KeyView key) const;

  std::size_t num_keys() const { return map_.size(); }
  std::size_t num_entries() const { return entries_; }
  const Map& entries() const { return map_; }

 private:
  std::size_t rank_;
  Map map_;
  std::size_t entries_ = 0;
};

/// All ranks of one physical relation index.
struct RelationIndex {
  IndexLayout layout;
  std::vector<ExtensionIndex> ranks;
  /// Distinct projected tuples.
  std::size_t size = 0;
};

/// Builds every rank of the index for `layout` from stored tuples. Duplicate
/// tuples are dropped (set semantics).
RelationIndex build_relation_index(const IndexLayout& layout, const std::vector<Tuple>& tuples);

/// The static extension indices of a query: one RelationIndex per distinct
/// layout, shared by every atom that uses it.
class IndexCatalog {
 public:
  IndexCatalog(const QueryPlan& plan, const Database& db);

  const QueryPlan& plan() const { return *plan_; }
  const RelationIndex& relation(RelationId i) const { return *per_relation_.at(i); }
  const ExtensionIndex& index(RelationId i, std::size_t rank) const {
    return per_relation_.at(i)->ranks.at(rank);
  }
  std::size_t physical_instances() const { return physical_.size(); }

  /// Views indexed [relation][rank], the form the engines consume.
  std::vector<std::vector<const ExtensionView*>> views() const;

  // Ext^i at `level` addressed by a full prefix of length >= level.
  std::size_t count(RelationId i, std::size_t level, KeyView prefix) const;
  bool contains(RelationId i, std::size_t level, KeyView prefix, Value e) const;
  std::vector<Value> enumerate(RelationId i, std::size_t level, KeyView prefix, std::size_t from,
                               std::size_t to) const;

  /// Indexed values owned by each worker under hash partitioning of keys.
  std::vector<std::uint64_t> indexed_per_worker(std::size_t workers, std::uint64_t seed) const;

 private:
  const Binding& binding_or_throw(RelationId i, std::size_t level) const;

  std::shared_ptr<const QueryPlan> plan_;
  std::map<IndexLayout, std::shared_ptr<RelationIndex>> physical_;
  std::vector<std::shared_ptr<RelationIndex>> per_relation_;
};

// ---------------------------------------------------------------------------
// Skew-resilient index triple
// ---------------------------------------------------------------------------

/// Count, extension-resolver and membership indices for one rank of one
/// relation, each hash-partitioned across workers by its own key:
///   count:      key            -> |Ext(key)|
///   resolver:   (key, k)       -> k-th extension, 1 <= k <= count, ascending
///   membership: (key, e)       -> e in Ext(key)
class SkewTriple {
 public:
  SkewTriple(const ExtensionIndex& base, std::size_t workers, std::uint64_t seed);

  std::size_t workers() const { return counts_.size(); }

  WorkerId count_owner(KeyView key) const;
  WorkerId resolver_owner(KeyView key, std::size_t k) const;
  WorkerId membership_owner(KeyView key, Value e) const;

  /// Lookups must be issued at the owning worker; a wrong worker sees nothing.
  std::size_t count(WorkerId at, KeyView key) const;
  std::optional<Value> resolve(WorkerId at, KeyView key, std::size_t k) const;
  bool contains(WorkerId at, KeyView key, Value e) const;

  /// Stored entries per worker across the three indices.
  std::vector<std::uint64_t> shard_sizes() const;
  std::uint64_t resolver_entries(WorkerId w) const { return resolvers_.at(w).size(); }

 private:
  using CountShard = std::unordered_map<Tuple, std::size_t, TupleHash, TupleEqual>;
  using ResolverShard = std::unordered_map<Tuple, Value, TupleHash, TupleEqual>;
  using MemberShard = std::unordered_set<Tuple, TupleHash, TupleEqual>;

  WorkerId owner_of(KeyView composite) const;

  std::uint64_t seed_;
  std::vector<CountShard> counts_;
  std::vector<ResolverShard> resolvers_;
  std::vector<MemberShard> members_;
};

/// One SkewTriple per rank of an atom's index.
std::vector<SkewTriple> build_skew_triple(const RelationIndex& index, std::size_t workers,
                                          std::uint64_t seed);

}  // namespace wcoj
