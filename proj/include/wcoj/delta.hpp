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
#include <string>
#include <vector>

#include "wcoj/bigjoin.hpp"
#include "wcoj/gj.hpp"
#include "wcoj/mvindex.hpp"
#include "wcoj/runtime.hpp"

namespace wcoj::delta {

/// Version read by a relation inside one delta query.
enum class Role {
  /// After the batch (R').
  New,
  /// The batch itself (dR_i).
  Delta,
  /// Before the batch (R).
  Old,
};

struct DeltaQuery {
  RelationId index = 0;
  std::vector<Role> roles;
  /// The input query under dQ_i's attribute order: R_i's attributes first,
  /// then the rest ascending.
  Query query;
};

std::vector<DeltaQuery> derive(const Query& q);

struct OutputDelta {
  Tuple tuple;
  Weight weight = 0;
  Timestamp time = 0;
  auto operator<=>(const OutputDelta&) const = default;
};

/// Updates of one batch, keyed by stored relation name.
using UpdateBatch = std::map<std::string, std::vector<SignedUpdate>>;

struct TimedBatch {
  Timestamp time = 0;
  UpdateBatch updates;
};

/// Groups updates of relation `source` into batches of equal timestamp.
/// Throws StaleTimestamp if timestamps decrease.
std::vector<TimedBatch> group_by_time(const std::vector<SignedUpdate>& updates,
                                      const std::string& source = "e");

/// Owning set of versioned views for one delta query.
struct VersionedViews {
  std::vector<std::unique_ptr<VersionedView>> owned;
  ViewTable table;
};

/// Multi-version indices for every layout used by the delta queries of a
/// query. Internal time 0 holds the base relations; a batch stamped t is
/// stored at t + 1.
class DynamicIndexSet {
 public:
  explicit DynamicIndexSet(const Query& q);

  const std::vector<DeltaQuery>& queries() const { return queries_; }
  const QueryPlan& plan(std::size_t i) const { return plans_.at(i); }

  void ingest(const UpdateBatch& batch, Timestamp internal_time);
  void advance(Timestamp frontier);

  /// Views of dQ_i at internal time t: R' reads time <= t, R reads time < t.
  VersionedViews views(std::size_t i, Timestamp t) const;

  /// dR_i as consolidated P_{r_i} seeds in dQ_i's global order.
  PrefixSet delta_seeds(std::size_t i, const UpdateBatch& batch) const;

  std::vector<std::uint64_t> stored_per_worker(std::size_t workers, std::uint64_t seed) const;
  std::uint64_t negative_weight_events() const;
  std::size_t physical_instances() const { return physical_.size(); }

 private:
  struct Physical {
    IndexLayout layout;
    std::vector<MultiVersionIndex> ranks;
  };

  std::vector<DeltaQuery> queries_;
  std::vector<QueryPlan> plans_;
  std::map<IndexLayout, std::unique_ptr<Physical>> physical_;
  std::vector<std::vector<Physical*>> per_query_;
};

/// Checks that a dR_i tuple survives as a P_{r_i} prefix of dQ_i: probes every
/// relation other than R_i that binds one of the first r_i attributes, and
/// applies filters. Returns the seed weight, or nullopt when it fails.
std::optional<Weight> seed_check(const QueryPlan& plan, const ViewTable& views, RelationId i,
                                 const Prefix& seed, gj::Stats* stats = nullptr);

/// Serial Delta-GJ.
class DeltaGJ {
 public:
  explicit DeltaGJ(const Query& q);

  void load(const Database& base);
  /// Output change caused by one batch, consolidated.
  std::vector<OutputDelta> apply(const UpdateBatch& batch, Timestamp t);

  const gj::Stats& stats() const { return stats_; }
  const DynamicIndexSet& indices() const { return indices_; }

 private:
  DynamicIndexSet indices_;
  gj::Stats stats_;
};

/// Delta-BiGJoin on one runtime whose ledger spans all batches.
class DeltaBigJoin {
 public:
  DeltaBigJoin(const Query& q, const WorkerConfig& config);

  void load(const Database& base);
  std::vector<OutputDelta> apply(const UpdateBatch& batch, Timestamp t);

  const CostLedger& ledger() const { return runtime_.ledger(); }
  Metrics metrics() const { return report(runtime_.ledger()); }
  const bigjoin::RunStats& stats() const { return stats_; }
  const DynamicIndexSet& indices() const { return indices_; }

 private:
  DynamicIndexSet indices_;
  Runtime runtime_;
  bigjoin::RunStats stats_;
};

std::vector<OutputDelta> run_delta_batch(DeltaBigJoin& engine, const UpdateBatch& batch,
                                         Timestamp t);

/// Serial Delta-GJ from `base` through every batch; one delta set per batch.
std::vector<std::vector<OutputDelta>> run_delta_serial(const Query& q, const Database& base,
                                                       const std::vector<TimedBatch>& batches,
                                                       gj::Stats* stats = nullptr);

/// Sums weights of equal tuples across deltas into a maintained result.
std::vector<WeightedTuple> accumulate(const std::vector<std::vector<OutputDelta>>& deltas);

}  // namespace wcoj::delta
