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

#include "wcoj/relcore.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_set>

namespace wcoj {

std::vector<AttributeId> RelationSchema::distinct_attributes() const {
  std::vector<AttributeId> out;
  for (AttributeId a : attributes) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

bool RelationSchema::contains(AttributeId a) const {
  return std::find(attributes.begin(), attributes.end(), a) != attributes.end();
}

std::string Query::attribute_name(AttributeId a) const {
  if (a < attribute_names.size()) return attribute_names[a];
  return "a" + std::to_string(a + 1);
}

std::vector<WeightedTuple> consolidate(std::vector<WeightedTuple> items) {
  std::sort(items.begin(), items.end(),
            [](const WeightedTuple& a, const WeightedTuple& b) { return a.tuple < b.tuple; });
  std::vector<WeightedTuple> out;
  for (auto& item : items) {
    if (!out.empty() && out.back().tuple == item.tuple) {
      out.back().weight += item.weight;
    } else {
      if (!out.empty() && out.back().weight == 0) out.pop_back();
      out.push_back(std::move(item));
    }
  }
  if (!out.empty() && out.back().weight == 0) out.pop_back();
  return out;
}

Query with_order(Query q, std::vector<AttributeId> order) {
  q.order = std::move(order);
  return q;
}

std::size_t InputSizes::total() const {
  return std::accumulate(per_relation.begin(), per_relation.end(), std::size_t{0});
}

InputSizes input_sizes(const Query& q, const Database& db) {
  InputSizes sizes;
  for (const auto& schema : q.schemas) {
    auto it = db.find(schema.source);
    if (it == db.end()) {
      sizes.per_relation.push_back(0);
      continue;
    }
    std::unordered_set<Tuple, TupleHash> distinct;
    for (const Tuple& t : it->second.tuples) {
      if (t.size() != schema.attributes.size()) continue;
      bool keep = true;
      for (std::size_t c = 0; c < t.size() && keep; ++c) {
        for (std::size_t d = c + 1; d < t.size(); ++d) {
          if (schema.attributes[c] == schema.attributes[d] && t[c] != t[d]) {
            keep = false;
            break;
          }
        }
      }
      if (keep) distinct.insert(t);
    }
    sizes.per_relation.push_back(distinct.size());
  }
  return sizes;
}

void validate_query(const Query& q) {
  const std::size_t m = q.num_attributes;
  if (q.order.size() != m) {
    throw BadOrder("attribute order has " + std::to_string(q.order.size()) +
                   " entries, query has " + std::to_string(m) + " attributes");
  }
  std::vector<bool> seen(m, false);
  for (AttributeId a : q.order) {
    if (a >= m || seen[a]) throw BadOrder("attribute order is not a permutation");
    seen[a] = true;
  }
  std::vector<bool> covered(m, false);
  for (std::size_t i = 0; i < q.schemas.size(); ++i) {
    const auto& s = q.schemas[i];
    if (s.attributes.empty()) throw ArityMismatch("relation " + s.source + " has no attributes");
    for (AttributeId a : s.attributes) {
      if (a >= m) throw DanglingAttribute("relation " + s.source + " mentions unknown attribute");
      covered[a] = true;
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    if (!covered[a]) {
      throw DanglingAttribute("attribute " + q.attribute_name(static_cast<AttributeId>(a)) +
                              " appears in no relation");
    }
  }
  for (const auto& f : q.filters) {
    if (f.lhs >= m || f.rhs >= m) throw DanglingAttribute("filter mentions unknown attribute");
  }
}

namespace {

std::vector<std::size_t> positions_of(const Query& q) {
  std::vector<std::size_t> pos(q.num_attributes, 0);
  for (std::size_t k = 0; k < q.order.size(); ++k) pos[q.order[k]] = k;
  return pos;
}

}  // namespace

std::vector<AttributeId> binding_attributes(const Query& q, RelationId i, std::size_t level) {
  const auto pos = positions_of(q);
  std::vector<AttributeId> out;
  for (AttributeId a : q.schemas.at(i).distinct_attributes()) {
    if (pos[a] < level) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [&](AttributeId x, AttributeId y) { return pos[x] < pos[y]; });
  return out;
}

std::vector<RelationId> relations_binding(const Query& q, std::size_t level) {
  std::vector<RelationId> out;
  const AttributeId a = q.order.at(level);
  for (std::size_t i = 0; i < q.schemas.size(); ++i) {
    if (q.schemas[i].contains(a)) out.push_back(static_cast<RelationId>(i));
  }
  return out;
}

QueryPlan::QueryPlan(Query q) : query_(std::move(q)) {
  validate_query(query_);
  const std::size_t m = query_.num_attributes;
  position_ = positions_of(query_);

  ordered_attributes_.reserve(query_.schemas.size());
  for (const auto& s : query_.schemas) {
    auto attrs = s.distinct_attributes();
    std::sort(attrs.begin(), attrs.end(),
              [&](AttributeId x, AttributeId y) { return position_[x] < position_[y]; });
    ordered_attributes_.push_back(std::move(attrs));
  }

  levels_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    LevelPlan& lp = levels_[j];
    lp.attribute = query_.order[j];
    for (std::size_t i = 0; i < query_.schemas.size(); ++i) {
      const auto& attrs = ordered_attributes_[i];
      auto it = std::find(attrs.begin(), attrs.end(), lp.attribute);
      if (it == attrs.end()) continue;
      Binding b;
      b.relation = static_cast<RelationId>(i);
      b.rank = static_cast<std::size_t>(it - attrs.begin());
      for (auto k = attrs.begin(); k != it; ++k) b.key_positions.push_back(position_[*k]);
      b.last = (b.rank + 1 == attrs.size());
      lp.bindings.push_back(std::move(b));
    }
  }
  for (const auto& f : query_.filters) {
    const std::size_t pl = position_[f.lhs];
    const std::size_t pr = position_[f.rhs];
    levels_[std::max(pl, pr)].filters.push_back({pl, pr});
  }
}

const Binding* QueryPlan::binding(RelationId i, std::size_t level) const {
  for (const auto& b : levels_.at(level).bindings) {
    if (b.relation == i) return &b;
  }
  return nullptr;
}

bool QueryPlan::passes_filters(std::size_t level, KeyView prefix) const {
  for (const auto& f : levels_[level].filters) {
    if (!(prefix[f.lhs] < prefix[f.rhs])) return false;
  }
  return true;
}

bool QueryPlan::passes_all_filters(KeyView prefix) const {
  for (std::size_t j = 0; j < prefix.size() && j < levels_.size(); ++j) {
    if (!passes_filters(j, prefix)) return false;
  }
  return true;
}

Tuple QueryPlan::to_attribute_order(KeyView prefix) const {
  Tuple out(query_.num_attributes);
  for (std::size_t k = 0; k < prefix.size(); ++k) out[query_.order[k]] = prefix[k];
  return out;
}

Tuple QueryPlan::to_global_order(KeyView tuple) const {
  Tuple out(query_.num_attributes);
  for (std::size_t a = 0; a < tuple.size(); ++a) out[position_[a]] = tuple[a];
  return out;
}

}  // namespace wcoj
