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

#include "wcoj/gj.hpp"

#include <algorithm>
#include <limits>

namespace wcoj::gj {

Stats& Stats::operator+=(const Stats& o) {
  count_reads += o.count_reads;
  proposals += o.proposals;
  membership_probes += o.membership_probes;
  smallest_first_violations += o.smallest_first_violations;
  return *this;
}

namespace {

const ExtensionView& view_for(const ViewTable& views, const Binding& b) {
  if (b.relation >= views.size() || b.rank >= views[b.relation].size() ||
      views[b.relation][b.rank] == nullptr) {
    throw MissingIndex("no extension index for relation " + std::to_string(b.relation + 1) +
                       " at rank " + std::to_string(b.rank));
  }
  return *views[b.relation][b.rank];
}

}  // namespace

PrefixSet extend_level(const QueryPlan& plan, const ViewTable& views, const PrefixSet& level,
                       Stats* stats) {
  Stats local;
  PrefixSet out;
  if (level.empty()) return out;
  const std::size_t j = level.front().values.size();
  const LevelPlan& lp = plan.level(j);
  const std::size_t n = plan.query().num_relations();

  std::vector<const ExtensionView*> bound_views;
  for (const auto& b : lp.bindings) bound_views.push_back(&view_for(views, b));

  std::vector<Tuple> keys(lp.bindings.size());
  std::vector<Value> candidates;
  std::vector<Weight> weights;
  Tuple extended;

  for (const Prefix& p : level) {
    std::uint64_t probes = 0;
    std::size_t min_count = std::numeric_limits<std::size_t>::max();
    std::size_t min_b = 0;
    for (std::size_t b = 0; b < lp.bindings.size(); ++b) {
      extract_key(lp.bindings[b], p.values, keys[b]);
      const std::size_t c = bound_views[b]->count(keys[b]);
      ++probes;
      ++local.count_reads;
      if (c < min_count) {
        min_count = c;
        min_b = b;
      }
      if (c == 0) break;
    }
    if (min_count == 0) continue;

    candidates.clear();
    weights.clear();
    bound_views[min_b]->enumerate(keys[min_b], 0, min_count, candidates, &weights);
    probes += min_count;
    local.proposals += min_count;

    extended = p.values;
    extended.push_back(0);
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const Value e = candidates[k];
      extended.back() = e;
      if (!plan.passes_filters(j, extended)) continue;
      Weight w = p.weight;
      if (lp.bindings[min_b].last) w *= weights[k];
      bool keep = true;
      for (std::size_t b = 0; b < lp.bindings.size() && keep; ++b) {
        if (b == min_b) continue;
        ++probes;
        ++local.membership_probes;
        const Weight mult = bound_views[b]->multiplicity(keys[b], e);
        if (mult == 0) {
          keep = false;
        } else if (lp.bindings[b].last) {
          w *= mult;
        }
      }
      if (keep && w != 0) out.push_back({extended, w});
    }
    if (probes > n * min_count + n) ++local.smallest_first_violations;
  }
  if (stats) *stats += local;
  return out;
}

std::vector<Tuple> RunResult::sorted_tuples() const {
  std::vector<Tuple> out;
  out.reserve(tuples.size());
  for (const auto& t : tuples) out.push_back(t.tuple);
  std::sort(out.begin(), out.end());
  return out;
}

RunResult run_from(const QueryPlan& plan, const ViewTable& views, PrefixSet seeds,
                   const RunOptions& options) {
  RunResult result;
  const std::size_t m = plan.num_levels();
  PrefixSet current = std::move(seeds);
  if (options.keep_levels) result.levels.push_back(current);
  const std::size_t start = current.empty() ? m : current.front().values.size();
  for (std::size_t j = start; j < m && !current.empty(); ++j) {
    current = extend_level(plan, views, current, &result.stats);
    if (options.keep_levels) result.levels.push_back(current);
  }
  for (auto& p : current) {
    if (p.values.size() == m) result.tuples.push_back({plan.to_attribute_order(p.values), p.weight});
  }
  return result;
}

RunResult run(const Query& q, const Database& db, const RunOptions& options) {
  QueryPlan plan(q);
  IndexCatalog catalog(plan, db);
  PrefixSet seeds{Prefix{{}, 1}};
  return run_from(plan, catalog.views(), std::move(seeds), options);
}

}  // namespace wcoj::gj
