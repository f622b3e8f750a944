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

#include "wcoj/delta.hpp"

#include <algorithm>
#include <set>

namespace wcoj::delta {

std::vector<DeltaQuery> derive(const Query& q) {
  validate_query(q);
  std::vector<DeltaQuery> out;
  for (RelationId i = 0; i < q.num_relations(); ++i) {
    DeltaQuery dq;
    dq.index = i;
    for (RelationId k = 0; k < q.num_relations(); ++k) {
      dq.roles.push_back(k < i ? Role::New : k == i ? Role::Delta : Role::Old);
    }
    std::vector<AttributeId> order = q.schemas[i].distinct_attributes();
    for (AttributeId a = 0; a < q.num_attributes; ++a) {
      if (std::find(order.begin(), order.end(), a) == order.end()) order.push_back(a);
    }
    dq.query = with_order(q, std::move(order));
    out.push_back(std::move(dq));
  }
  return out;
}

std::vector<TimedBatch> group_by_time(const std::vector<SignedUpdate>& updates,
                                      const std::string& source) {
  std::vector<TimedBatch> out;
  for (const auto& u : updates) {
    if (!out.empty() && u.time < out.back().time) {
      throw StaleTimestamp("update at time " + std::to_string(u.time) + " after time " +
                           std::to_string(out.back().time));
    }
    if (out.empty() || u.time != out.back().time) out.push_back({u.time, {}});
    out.back().updates[source].push_back(u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// DynamicIndexSet
// ---------------------------------------------------------------------------

DynamicIndexSet::DynamicIndexSet(const Query& q) : queries_(derive(q)) {
  for (const auto& dq : queries_) plans_.emplace_back(dq.query);
  for (const auto& plan : plans_) {
    std::vector<Physical*> row;
    for (RelationId k = 0; k < q.num_relations(); ++k) {
      IndexLayout layout = layout_for(plan, k);
      auto it = physical_.find(layout);
      if (it == physical_.end()) {
        auto phys = std::make_unique<Physical>();
        phys->layout = layout;
        phys->ranks.resize(layout.columns.size());
        it = physical_.emplace(std::move(layout), std::move(phys)).first;
      }
      row.push_back(it->second.get());
    }
    per_query_.push_back(std::move(row));
  }
}

void DynamicIndexSet::ingest(const UpdateBatch& batch, Timestamp internal_time) {
  for (auto& [layout, phys] : physical_) {
    auto src = batch.find(layout.source);
    if (src == batch.end()) continue;
    std::vector<std::vector<SignedUpdate>> per_rank(phys->ranks.size());
    for (const auto& u : src->second) {
      auto proj = project(layout, u.tuple);
      if (!proj) continue;
      for (std::size_t r = 0; r < per_rank.size(); ++r) {
        per_rank[r].push_back(
            {Tuple(proj->begin(), proj->begin() + static_cast<std::ptrdiff_t>(r + 1)),
             internal_time, u.weight});
      }
    }
    for (std::size_t r = 0; r < per_rank.size(); ++r) phys->ranks[r].ingest(per_rank[r]);
  }
}

void DynamicIndexSet::advance(Timestamp frontier) {
  for (auto& [layout, phys] : physical_) {
    for (auto& idx : phys->ranks) idx.advance(frontier);
  }
}

VersionedViews DynamicIndexSet::views(std::size_t i, Timestamp t) const {
  VersionedViews out;
  const DeltaQuery& dq = queries_.at(i);
  for (RelationId k = 0; k < dq.roles.size(); ++k) {
    const bool inclusive = dq.roles[k] != Role::Old;
    std::vector<const ExtensionView*> ranks;
    for (const auto& idx : per_query_[i][k]->ranks) {
      out.owned.push_back(std::make_unique<VersionedView>(idx, t, inclusive));
      ranks.push_back(out.owned.back().get());
    }
    out.table.push_back(std::move(ranks));
  }
  return out;
}

PrefixSet DynamicIndexSet::delta_seeds(std::size_t i, const UpdateBatch& batch) const {
  const IndexLayout& layout = per_query_.at(i).at(i)->layout;
  PrefixSet out;
  auto src = batch.find(layout.source);
  if (src == batch.end()) return out;
  std::map<Tuple, Weight> acc;
  for (const auto& u : src->second) {
    auto proj = project(layout, u.tuple);
    if (proj) acc[*proj] += u.weight;
  }
  for (auto& [t, w] : acc) {
    if (w != 0) out.push_back({t, w});
  }
  return out;
}

std::vector<std::uint64_t> DynamicIndexSet::stored_per_worker(std::size_t workers,
                                                              std::uint64_t seed) const {
  std::vector<std::uint64_t> out(workers, 0);
  for (const auto& [layout, phys] : physical_) {
    for (const auto& idx : phys->ranks) {
      idx.for_each_key([&](const Tuple& key, std::size_t n) {
        out[hash_values(key, seed) % workers] += n;
      });
    }
  }
  return out;
}

std::uint64_t DynamicIndexSet::negative_weight_events() const {
  std::uint64_t n = 0;
  for (const auto& [layout, phys] : physical_) {
    for (const auto& idx : phys->ranks) n += idx.negative_weight_events();
  }
  return n;
}

// ---------------------------------------------------------------------------
// Engines
// ---------------------------------------------------------------------------

std::optional<Weight> seed_check(const QueryPlan& plan, const ViewTable& views, RelationId i,
                                 const Prefix& seed, gj::Stats* stats) {
  const std::size_t s = seed.values.size();
  for (std::size_t l = 0; l < s; ++l) {
    if (!plan.passes_filters(l, seed.values)) return std::nullopt;
  }
  Weight w = seed.weight;
  Tuple key;
  for (std::size_t l = 0; l < s; ++l) {
    for (const Binding& b : plan.level(l).bindings) {
      if (b.relation == i) continue;
      extract_key(b, seed.values, key);
      const Weight mult = views.at(b.relation).at(b.rank)->multiplicity(key, seed.values[l]);
      if (stats) ++stats->membership_probes;
      if (mult == 0) return std::nullopt;
      if (b.last) w *= mult;
    }
  }
  if (w == 0) return std::nullopt;
  return w;
}

namespace {

UpdateBatch base_batch(const Database& base) {
  UpdateBatch batch;
  for (const auto& [name, rel] : base) {
    std::set<Tuple> distinct(rel.tuples.begin(), rel.tuples.end());
    auto& ups = batch[name];
    for (const auto& t : distinct) ups.push_back({t, 0, 1});
  }
  return batch;
}

std::vector<OutputDelta> finish(std::vector<WeightedTuple> raw, Timestamp t) {
  std::vector<OutputDelta> out;
  for (auto& wt : consolidate(std::move(raw))) out.push_back({std::move(wt.tuple), wt.weight, t});
  return out;
}

}  // namespace

DeltaGJ::DeltaGJ(const Query& q) : indices_(q) {}

void DeltaGJ::load(const Database& base) {
  indices_.ingest(base_batch(base), 0);
  indices_.advance(1);
}

std::vector<OutputDelta> DeltaGJ::apply(const UpdateBatch& batch, Timestamp t) {
  const Timestamp now = t + 1;
  indices_.ingest(batch, now);
  std::vector<WeightedTuple> raw;
  for (std::size_t i = 0; i < indices_.queries().size(); ++i) {
    const QueryPlan& plan = indices_.plan(i);
    VersionedViews views = indices_.views(i, now);
    PrefixSet seeds;
    for (auto& p : indices_.delta_seeds(i, batch)) {
      if (auto w = seed_check(plan, views.table, static_cast<RelationId>(i), p, &stats_)) {
        seeds.push_back({std::move(p.values), *w});
      }
    }
    if (seeds.empty()) continue;
    gj::RunResult r = gj::run_from(plan, views.table, std::move(seeds));
    stats_ += r.stats;
    for (auto& wt : r.tuples) raw.push_back(std::move(wt));
  }
  indices_.advance(now + 1);
  return finish(std::move(raw), t);
}

DeltaBigJoin::DeltaBigJoin(const Query& q, const WorkerConfig& config)
    : indices_(q), runtime_(config) {}

void DeltaBigJoin::load(const Database& base) {
  indices_.ingest(base_batch(base), 0);
  indices_.advance(1);
  runtime_.set_indexed(
      indices_.stored_per_worker(runtime_.workers(), runtime_.config().hash_seed));
}

std::vector<OutputDelta> DeltaBigJoin::apply(const UpdateBatch& batch, Timestamp t) {
  const Timestamp now = t + 1;
  indices_.ingest(batch, now);
  std::vector<WeightedTuple> raw;
  for (std::size_t i = 0; i < indices_.queries().size(); ++i) {
    PrefixSet seeds = indices_.delta_seeds(i, batch);
    if (seeds.empty()) continue;
    VersionedViews views = indices_.views(i, now);
    bigjoin::SeedSpec spec{std::move(seeds), {static_cast<RelationId>(i)}};
    const bigjoin::RunStats s =
        bigjoin::run_dataflow(indices_.plan(i), views.table, std::move(spec), runtime_, raw);
    stats_.steps += s.steps;
    stats_.outputs += s.outputs;
    stats_.max_queued_candidates = std::max(stats_.max_queued_candidates, s.max_queued_candidates);
    stats_.max_level_quads = std::max(stats_.max_level_quads, s.max_level_quads);
    stats_.probes += s.probes;
  }
  indices_.advance(now + 1);
  runtime_.set_indexed(
      indices_.stored_per_worker(runtime_.workers(), runtime_.config().hash_seed));
  return finish(std::move(raw), t);
}

std::vector<OutputDelta> run_delta_batch(DeltaBigJoin& engine, const UpdateBatch& batch,
                                         Timestamp t) {
  return engine.apply(batch, t);
}

std::vector<std::vector<OutputDelta>> run_delta_serial(const Query& q, const Database& base,
                                                       const std::vector<TimedBatch>& batches,
                                                       gj::Stats* stats) {
  DeltaGJ engine(q);
  engine.load(base);
  std::vector<std::vector<OutputDelta>> out;
  for (const auto& b : batches) out.push_back(engine.apply(b.updates, b.time));
  if (stats) *stats += engine.stats();
  return out;
}

std::vector<WeightedTuple> accumulate(const std::vector<std::vector<OutputDelta>>& deltas) {
  std::vector<WeightedTuple> all;
  for (const auto& batch : deltas) {
    for (const auto& d : batch) all.push_back({d.tuple, d.weight});
  }
  return consolidate(std::move(all));
}

}  // namespace wcoj::delta
