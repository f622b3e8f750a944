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

#include "wcoj/mvindex.hpp"

#include <algorithm>

namespace wcoj {

namespace {

KeyView key_of(const Tuple& t) { return KeyView(t.data(), t.size() - 1); }

}  // namespace

void MultiVersionIndex::ingest(std::span<const SignedUpdate> updates) {
  for (const auto& u : updates) {
    if (u.tuple.empty()) throw ArityMismatch("versioned update needs at least a value column");
    if (u.time < frontier_) {
      throw StaleTimestamp("update at time " + std::to_string(u.time) + " is behind frontier " +
                           std::to_string(frontier_));
    }
  }
  uncommitted_.insert(uncommitted_.end(), updates.begin(), updates.end());
  std::stable_sort(uncommitted_.begin(), uncommitted_.end(),
                   [](const SignedUpdate& a, const SignedUpdate& b) { return a.time < b.time; });
  rebuild_uncommitted_index();
}

void MultiVersionIndex::rebuild_uncommitted_index() {
  uncommitted_by_key_.clear();
  for (std::size_t k = 0; k < uncommitted_.size(); ++k) {
    const Tuple& t = uncommitted_[k].tuple;
    auto it = uncommitted_by_key_.find(key_of(t));
    if (it == uncommitted_by_key_.end()) {
      it = uncommitted_by_key_.emplace(Tuple(t.begin(), t.end() - 1), std::vector<std::size_t>{})
               .first;
    }
    it->second.push_back(k);
  }
}

void MultiVersionIndex::advance(Timestamp new_frontier) {
  if (new_frontier < frontier_) {
    throw FrontierRegression("frontier " + std::to_string(new_frontier) + " is behind " +
                             std::to_string(frontier_));
  }
  if (new_frontier == frontier_) return;
  frontier_ = new_frontier;

  auto end = std::partition_point(uncommitted_.begin(), uncommitted_.end(),
                                  [&](const SignedUpdate& u) { return u.time < new_frontier; });
  if (end == uncommitted_.begin()) return;

  std::vector<KeyState*> touched;
  for (auto it = uncommitted_.begin(); it != end; ++it) {
    const Tuple& t = it->tuple;
    auto found = committed_.find(key_of(t));
    if (found == committed_.end()) {
      found = committed_.emplace(Tuple(t.begin(), t.end() - 1), KeyState{}).first;
    }
    found->second.log.push_back({t.back(), it->time, it->weight});
    touched.push_back(&found->second);
  }
  uncommitted_.erase(uncommitted_.begin(), end);
  rebuild_uncommitted_index();

  for (KeyState* state : touched) {
    if (state->log.size() > 2 * std::max<std::size_t>(1, state->distinct_values)) {
      compact_key(*state);
    }
  }
}

void MultiVersionIndex::compact() {
  for (auto& [key, state] : committed_) {
    if (!state.log.empty()) compact_key(state);
  }
}

void MultiVersionIndex::compact_key(KeyState& state) {
  std::vector<Update> merged;
  merged.reserve(state.compacted.size() + state.log.size());
  merged.insert(merged.end(), state.compacted.begin(), state.compacted.end());
  merged.insert(merged.end(), state.log.begin(), state.log.end());
  std::sort(merged.begin(), merged.end(), [](const Update& a, const Update& b) {
    return a.value != b.value ? a.value < b.value : a.time < b.time;
  });

  std::vector<Update> out;
  std::size_t distinct = 0;
  for (std::size_t k = 0; k < merged.size();) {
    const Value v = merged[k].value;
    Weight running = 0;
    bool negative = false;
    bool any = false;
    while (k < merged.size() && merged[k].value == v) {
      const Timestamp t = merged[k].time;
      Weight w = 0;
      while (k < merged.size() && merged[k].value == v && merged[k].time == t) {
        w += merged[k].weight;
        ++k;
      }
      if (w == 0) continue;
      running += w;
      negative = negative || running < 0;
      out.push_back({v, t, w});
      any = true;
    }
    if (any) ++distinct;
    if (negative) ++negative_events_;
  }
  state.compacted = std::move(out);
  state.log.clear();
  state.distinct_values = distinct;
  ++compactions_;
}

VersionedQueryResult MultiVersionIndex::accumulate(KeyView key, Timestamp bound,
                                                   bool inclusive) const {
  auto visible = [&](Timestamp t) { return inclusive ? t <= bound : t < bound; };
  std::vector<VersionedEntry> raw;
  if (auto it = committed_.find(key); it != committed_.end()) {
    for (const auto& u : it->second.compacted) {
      if (visible(u.time)) raw.push_back({u.value, u.weight});
    }
    for (const auto& u : it->second.log) {
      if (visible(u.time)) raw.push_back({u.value, u.weight});
    }
  }
  if (auto it = uncommitted_by_key_.find(key); it != uncommitted_by_key_.end()) {
    for (std::size_t k : it->second) {
      const auto& u = uncommitted_[k];
      if (visible(u.time)) raw.push_back({u.tuple.back(), u.weight});
    }
  }
  std::sort(raw.begin(), raw.end(),
            [](const VersionedEntry& a, const VersionedEntry& b) { return a.value < b.value; });
  VersionedQueryResult out;
  for (std::size_t k = 0; k < raw.size();) {
    VersionedEntry acc{raw[k].value, 0};
    while (k < raw.size() && raw[k].value == acc.value) acc.weight += raw[k++].weight;
    if (acc.weight != 0) out.push_back(acc);
  }
  return out;
}

VersionedQueryResult MultiVersionIndex::query_at(KeyView key, Timestamp time) const {
  return accumulate(key, time, true);
}

VersionedQueryResult MultiVersionIndex::query_before(KeyView key, Timestamp time) const {
  return accumulate(key, time, false);
}

std::size_t MultiVersionIndex::uncompacted_size() const {
  std::size_t n = 0;
  for (const auto& [key, state] : committed_) n += state.log.size();
  return n;
}

std::size_t MultiVersionIndex::compacted_size() const {
  std::size_t n = 0;
  for (const auto& [key, state] : committed_) n += state.compacted.size();
  return n;
}

// ---------------------------------------------------------------------------
// VersionedView
// ---------------------------------------------------------------------------

const VersionedQueryResult& VersionedView::lookup(KeyView key) const {
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    auto result = inclusive_ ? index_->query_at(key, time_) : index_->query_before(key, time_);
    it = cache_.emplace(Tuple(key.begin(), key.end()), std::move(result)).first;
  }
  return it->second;
}

Weight VersionedView::multiplicity(KeyView key, Value value) const {
  const auto& entries = lookup(key);
  auto it = std::lower_bound(entries.begin(), entries.end(), value,
                             [](const VersionedEntry& e, Value v) { return e.value < v; });
  return (it != entries.end() && it->value == value) ? it->weight : 0;
}

void VersionedView::enumerate(KeyView key, std::size_t from, std::size_t to,
                              std::vector<Value>& values, std::vector<Weight>* weights) const {
  const auto& entries = lookup(key);
  if (from > to || to > entries.size()) {
    throw RangeError("slice [" + std::to_string(from) + "," + std::to_string(to) +
                     ") outside extension set of size " + std::to_string(entries.size()));
  }
  for (std::size_t k = from; k < to; ++k) {
    values.push_back(entries[k].value);
    if (weights) weights->push_back(entries[k].weight);
  }
}

}  // namespace wcoj
