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

#include <deque>
#include <optional>
#include <vector>

#include "wcoj/gj.hpp"
#include "wcoj/index.hpp"
#include "wcoj/runtime.hpp"

namespace wcoj::bigjoin {

/// A prefix whose count minimization is complete, waiting at the worker that
/// owns Ext^{min_relation}(p). Extensions [0, cursor) were already proposed.
struct ProposalQuad {
  Prefix prefix;
  std::size_t min_count = 0;
  RelationId min_relation = kNoRelation;
  std::size_t cursor = 0;

  std::size_t remaining() const { return min_count - cursor; }
};

struct CandidateExtension {
  Prefix prefix;
  Value value = 0;
  RelationId min_relation = kNoRelation;
};

/// (p, min-c, min-i) during count minimization; starts as (p, inf, none).
struct CountTriple {
  Prefix prefix;
  std::size_t min_count = static_cast<std::size_t>(-1);
  RelationId min_relation = kNoRelation;
};

/// Which stage to step next.
struct Decision {
  std::size_t stage = 0;
  /// The selection rule was met (false in drain mode).
  bool full = false;
};

enum class ScheduleRule {
  /// Some worker holds at least B' units.
  AnyWorker,
  /// Every worker holds at least B' units.
  AllWorkers,
};

/// `work[stage][worker]` is the pending work of each worker at each stage.
/// Picks the largest stage meeting the rule, else the largest non-empty stage;
/// nullopt when everything is empty.
std::optional<Decision> schedule(const std::vector<std::vector<std::uint64_t>>& work,
                                 std::size_t batch_per_worker, ScheduleRule rule);

/// Count minimization of one triple at `level`, visiting the relations that
/// bind the level in id order; a strictly smaller count replaces the minimum.
/// A zero count ends the visit.
CountTriple count_minimize(const QueryPlan& plan, const ViewTable& views, std::size_t level,
                           CountTriple triple);

/// Proposes up to `budget` candidates at `level` from the front of `queue`,
/// advancing cursors and dropping exhausted quads. Candidates failing a filter
/// are consumed but not emitted. Returns the number of extensions consumed.
std::size_t propose(const QueryPlan& plan, const ViewTable& views, std::size_t level,
                    std::deque<ProposalQuad>& queue, std::size_t budget,
                    std::vector<CandidateExtension>& out);

struct RunStats {
  std::uint64_t steps = 0;
  /// Peak number of prefixes and candidates in flight, summed over workers.
  std::uint64_t max_queued_candidates = 0;
  /// Peak stored quads at one level, summed over workers.
  std::uint64_t max_level_quads = 0;
  std::uint64_t outputs = 0;
  gj::Stats probes;
};

/// Prefixes entering the dataflow at level s = seed length. Bindings below s
/// of relations not listed in `seed_relations` are verified by membership
/// probes before a seed counts as a member of P_s.
struct SeedSpec {
  PrefixSet seeds;
  std::vector<RelationId> seed_relations;
};

/// Seeds for a static run: the edges of a relation whose first two ordered
/// attributes are the first two of the global order, else P_0 = {()}.
SeedSpec static_seeds(const QueryPlan& plan, const IndexCatalog& catalog);

/// Runs the primitive to completion on `runtime` and appends outputs
/// (attribute-id order, unconsolidated) to `out`.
RunStats run_dataflow(const QueryPlan& plan, const ViewTable& views, SeedSpec seeds,
                      Runtime& runtime, std::vector<WeightedTuple>& out);

struct StaticResult {
  std::vector<WeightedTuple> tuples;
  RunStats stats;
  CostLedger ledger;

  Metrics metrics() const { return report(ledger); }
  std::vector<Tuple> sorted_tuples() const;
};

StaticResult run_static(const Query& q, const Database& db, const WorkerConfig& config);

}  // namespace wcoj::bigjoin
