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

#include "wcoj/index.hpp"

#include <algorithm>

namespace wcoj {

IndexLayout layout_for(const QueryPlan& plan, RelationId i) {
  const auto& schema = plan.query().schemas.at(i);
  IndexLayout layout;
  layout.source = schema.source;
  layout.source_arity = schema.attributes.size();
  for (AttributeId a : plan.ordered_attributes(i)) {
    auto it = std::find(schema.attributes.begin(), schema.attributes.end(), a);
    layout.columns.push_back(static_cast<std::size_t>(it - schema.attributes.begin()));
  }
  for (std::size_t c = 0; c < schema.attributes.size(); ++c) {
    for (std::size_t d = c + 1; d < schema.attributes.size(); ++d) {
      if (schema.attributes[c] == schema.attributes[d]) layout.equalities.emplace_back(c, d);
    }
  }
  return layout;
}

std::optional<Tuple> project(const IndexLayout& layout, const Tuple& source_tuple) {
  if (source_tuple.size() != layout.source_arity) {
    throw ArityMismatch("tuple of arity " + std::to_string(source_tuple.size()) + " for relation " +
                        layout.source + " of arity " + std::to_string(layout.source_arity));
  }
  for (auto [c, d] : layout.equalities) {
    if (source_tuple[c] != source_tuple[d]) return std::nullopt;
  }
  Tuple out;
  out.reserve(layout.columns.size());
  for (std::size_t c : layout.columns) out.push_back(source_tuple[c]);
  return out;
}

// ---------------------------------------------------------------------------
// ExtensionIndex
// ---------------------------------------------------------------------------

void ExtensionIndex::insert(KeyView key, Value value) {
  auto it = map_.find(key);
  if (it == map_.end()) it = map_.emplace(Tuple(key.begin(), key.end()), Entry{}).first;
  if (it->second.members.insert(value).second) {
    it->second.values.push_back(value);
    ++entries_;
  }
}

void ExtensionIndex::seal() {
  for (auto& [key, entry] : map_) std::sort(entry.values.begin(), entry.values.end());
}

const std::vector<Value>* ExtensionIndex::find(KeyView key) const {
  auto it = map_.find(key);
  return it == map_.end() ? nullptr : &it->second.values;
}

std::size_t ExtensionIndex::count(KeyView key) const {
  auto it = map_.find(key);
  return it == map_.end() ? 0 : it->second.values.size();
}

Weight ExtensionIndex::multiplicity(KeyView key, Value value) const {
  auto it = map_.find(key);
  if (it == map_.end()) return 0;
  return it->second.members.count(value) ? 1 : 0;
}

void ExtensionIndex::enumerate(KeyView key, std::size_t from, std::size_t to,
                               std::vector<Value>& values, std::vector<Weight>* weights) const {
  const auto* list = find(key);
  const std::size_t n = list ? list->size() : 0;
  if (from > to || to > n) {
    throw RangeError("slice [" + std::to_string(from) + "," + std::to_string(to) +
                     ") outside extension set of size " + std::to_string(n));
  }
  if (from == to) return;
  values.insert(values.end(), list->begin() + static_cast<std::ptrdiff_t>(from),
                list->begin() + static_cast<std::ptrdiff_t>(to));
  if (weights) weights->insert(weights->end(), to - from, Weight{1});
}

std::vector<Value> ExtensionIndex::enumerate(KeyView key, std::size_t from, std::size_t to) const {
  std::vector<Value> out;
  enumerate(key, from, to, out, nullptr);
  return out;
}

RelationIndex build_relation_index(const IndexLayout& layout, const std::vector<Tuple>& tuples) {
  RelationIndex index;
  index.layout = layout;
  const std::size_t r = layout.columns.size();
  for (std::size_t t = 0; t < r; ++t) index.ranks.emplace_back(t);
  for (const Tuple& source : tuples) {
    auto projected = project(layout, source);
    if (!projected) continue;
    const Tuple& p = *projected;
    // The last rank sees each distinct projected tuple exactly once.
    const std::size_t before = index.ranks[r - 1].num_entries();
    index.ranks[r - 1].insert(KeyView(p.data(), r - 1), p[r - 1]);
    if (index.ranks[r - 1].num_entries() == before) continue;
    ++index.size;
    for (std::size_t t = 0; t + 1 < r; ++t) index.ranks[t].insert(KeyView(p.data(), t), p[t]);
  }
  for (auto& rank : index.ranks) rank.seal();
  return index;
}

// ---------------------------------------------------------------------------
// IndexCatalog
// ---------------------------------------------------------------------------

IndexCatalog::IndexCatalog(const QueryPlan& plan, const Database& db)
    : plan_(std::make_shared<QueryPlan>(plan)) {
  static const std::vector<Tuple> kEmpty;
  for (std::size_t i = 0; i < plan_->query().num_relations(); ++i) {
    IndexLayout layout = layout_for(*plan_, static_cast<RelationId>(i));
    auto it = physical_.find(layout);
    if (it == physical_.end()) {
      auto src = db.find(layout.source);
      if (src != db.end() && src->second.arity != layout.source_arity) {
        throw ArityMismatch("relation " + layout.source + " has arity " +
                            std::to_string(src->second.arity) + ", query uses " +
                            std::to_string(layout.source_arity));
      }
      const auto& tuples = src == db.end() ? kEmpty : src->second.tuples;
      auto built = std::make_shared<RelationIndex>(build_relation_index(layout, tuples));
      it = physical_.emplace(std::move(layout), std::move(built)).first;
    }
    per_relation_.push_back(it->second);
  }
}

std::vector<std::vector<const ExtensionView*>> IndexCatalog::views() const {
  std::vector<std::vector<const ExtensionView*>> out;
  for (const auto& rel : per_relation_) {
    std::vector<const ExtensionView*> ranks;
    for (const auto& idx : rel->ranks) ranks.push_back(&idx);
    out.push_back(std::move(ranks));
  }
  return out;
}

const Binding& IndexCatalog::binding_or_throw(RelationId i, std::size_t level) const {
  const Binding* b = plan_->binding(i, level);
  if (!b) {
    throw MissingIndex("relation " + std::to_string(i + 1) + " does not bind level " +
                       std::to_string(level));
  }
  return *b;
}

std::size_t IndexCatalog::count(RelationId i, std::size_t level, KeyView prefix) const {
  const Binding& b = binding_or_throw(i, level);
  return index(i, b.rank).count(extract_key(b, prefix));
}

bool IndexCatalog::contains(RelationId i, std::size_t level, KeyView prefix, Value e) const {
  const Binding& b = binding_or_throw(i, level);
  return index(i, b.rank).contains(extract_key(b, prefix), e);
}

std::vector<Value> IndexCatalog::enumerate(RelationId i, std::size_t level, KeyView prefix,
                                           std::size_t from, std::size_t to) const {
  const Binding& b = binding_or_throw(i, level);
  return index(i, b.rank).enumerate(extract_key(b, prefix), from, to);
}

std::vector<std::uint64_t> IndexCatalog::indexed_per_worker(std::size_t workers,
                                                            std::uint64_t seed) const {
  std::vector<std::uint64_t> out(workers, 0);
  for (const auto& [layout, rel] : physical_) {
    for (const auto& rank : rel->ranks) {
      for (const auto& [key, entry] : rank.entries()) {
        out[hash_values(key, seed) % workers] += entry.values.size();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SkewTriple
// ---------------------------------------------------------------------------

namespace {

Tuple composite(KeyView key, Value last) {
  Tuple t(key.begin(), key.end());
  t.push_back(last);
  return t;
}

}  // namespace

SkewTriple::SkewTriple(const ExtensionIndex& base, std::size_t workers, std::uint64_t seed)
    : seed_(seed), counts_(workers), resolvers_(workers), members_(workers) {
  for (const auto& [key, entry] : base.entries()) {
    counts_[count_owner(key)].emplace(key, entry.values.size());
    for (std::size_t k = 1; k <= entry.values.size(); ++k) {
      Tuple rk = composite(key, k);
      const WorkerId w = owner_of(rk);
      resolvers_[w].emplace(std::move(rk), entry.values[k - 1]);
    }
    for (Value e : entry.values) {
      Tuple me = composite(key, e);
      const WorkerId w = owner_of(me);
      members_[w].insert(std::move(me));
    }
  }
}

WorkerId SkewTriple::owner_of(KeyView composite_key) const {
  return static_cast<WorkerId>(hash_values(composite_key, seed_) % counts_.size());
}

WorkerId SkewTriple::count_owner(KeyView key) const { return owner_of(key); }

WorkerId SkewTriple::resolver_owner(KeyView key, std::size_t k) const {
  return owner_of(composite(key, k));
}

WorkerId SkewTriple::membership_owner(KeyView key, Value e) const {
  return owner_of(composite(key, e));
}

std::size_t SkewTriple::count(WorkerId at, KeyView key) const {
  const auto& shard = counts_.at(at);
  auto it = shard.find(key);
  return it == shard.end() ? 0 : it->second;
}

std::optional<Value> SkewTriple::resolve(WorkerId at, KeyView key, std::size_t k) const {
  const auto& shard = resolvers_.at(at);
  auto it = shard.find(composite(key, k));
  if (it == shard.end()) return std::nullopt;
  return it->second;
}

bool SkewTriple::contains(WorkerId at, KeyView key, Value e) const {
  return members_.at(at).count(composite(key, e)) != 0;
}

std::vector<std::uint64_t> SkewTriple::shard_sizes() const {
  std::vector<std::uint64_t> out(counts_.size());
  for (std::size_t w = 0; w < out.size(); ++w) {
    out[w] = counts_[w].size() + resolvers_[w].size() + members_[w].size();
  }
  return out;
}

std::vector<SkewTriple> build_skew_triple(const RelationIndex& index, std::size_t workers,
                                          std::uint64_t seed) {
  std::vector<SkewTriple> out;
  out.reserve(index.ranks.size());
  for (const auto& rank : index.ranks) out.emplace_back(rank, workers, seed);
  return out;
}

}  // namespace wcoj
