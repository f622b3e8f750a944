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

#include "wcoj/testkit.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <limits>
#include <set>

namespace wcoj::testkit {

namespace {

class NestedLoop {
 public:
  NestedLoop(const Query& q, const Database& db, const OracleLimits& limits)
      : q_(q), limits_(limits), binding_(q.num_attributes) {
    for (const auto& s : q.schemas) {
      auto it = db.find(s.source);
      std::set<Tuple> distinct;
      if (it != db.end()) {
        for (const auto& t : it->second.tuples) {
          if (t.size() != s.attributes.size()) throw ArityMismatch("stored tuple arity differs");
          distinct.insert(t);
        }
      }
      if (distinct.size() > limits.max_tuples) throw ScaleGuard("relation too large for the oracle");
      relations_.emplace_back(distinct.begin(), distinct.end());
    }
  }

  std::vector<WeightedTuple> run() {
    descend(0);
    std::sort(out_.begin(), out_.end());
    return out_;
  }

 private:
  void descend(std::size_t atom) {
    if (atom == q_.schemas.size()) {
      Tuple t(q_.num_attributes);
      for (std::size_t a = 0; a < t.size(); ++a) {
        if (!binding_[a]) return;
        t[a] = *binding_[a];
      }
      for (const auto& f : q_.filters) {
        if (!(t[f.lhs] < t[f.rhs])) return;
      }
      out_.push_back({std::move(t), 1});
      return;
    }
    const auto& attrs = q_.schemas[atom].attributes;
    for (const Tuple& tuple : relations_[atom]) {
      if (++steps_ > limits_.max_steps) throw ScaleGuard("oracle step budget exhausted");
      std::vector<AttributeId> bound_here;
      bool ok = true;
      for (std::size_t c = 0; c < attrs.size() && ok; ++c) {
        auto& slot = binding_[attrs[c]];
        if (slot) {
          ok = *slot == tuple[c];
        } else {
          slot = tuple[c];
          bound_here.push_back(attrs[c]);
        }
      }
      if (ok) descend(atom + 1);
      for (AttributeId a : bound_here) binding_[a].reset();
    }
  }

  const Query& q_;
  OracleLimits limits_;
  std::vector<std::vector<Tuple>> relations_;
  std::vector<std::optional<Value>> binding_;
  std::vector<WeightedTuple> out_;
  std::uint64_t steps_ = 0;
};

}  // namespace

std::vector<WeightedTuple> oracle_join(const Query& q, const Database& db,
                                       const OracleLimits& limits) {
  return NestedLoop(q, db, limits).run();
}

std::vector<WeightedTuple> oracle_diff(const Query& q, const Database& before,
                                       const Database& after, const OracleLimits& limits) {
  auto out = oracle_join(q, after, limits);
  for (auto t : oracle_join(q, before, limits)) {
    t.weight = -t.weight;
    out.push_back(std::move(t));
  }
  return consolidate(std::move(out));
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % n;
  }
}

Relation erdos_renyi(std::size_t nv, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Relation g;
  for (Value u = 0; u < nv; ++u) {
    for (Value v = 0; v < nv; ++v) {
      if (u == v) continue;
      if (unit_uniform(rng) < p) g.tuples.push_back({u, v});
    }
  }
  return g;
}

Relation star(std::size_t hub_degree, bool back_edges) {
  Relation g;
  for (Value s = 1; s <= hub_degree; ++s) {
    g.tuples.push_back({0, s});
    if (back_edges) g.tuples.push_back({s, 0});
  }
  return g;
}

Relation cycle(std::size_t k) {
  Relation g;
  for (Value i = 0; i < k; ++i) g.tuples.push_back({i, (i + 1) % k});
  return g;
}

Relation sample_graph() {
  Relation g;
  g.tuples = {{1, 6}, {6, 7}, {7, 1},  {6, 8},  {6, 9}, {6, 10},
              {6, 11}, {2, 8}, {3, 9}, {4, 10}, {5, 11}};
  return g;
}

Relation symmetrize(const Relation& g) {
  std::set<Tuple> edges;
  for (const auto& t : g.tuples) {
    edges.insert({t[0], t[1]});
    edges.insert({t[1], t[0]});
  }
  Relation out;
  out.tuples.assign(edges.begin(), edges.end());
  return out;
}

Database graph_db(const Relation& edges) {
  Database db;
  db["e"] = edges;
  return db;
}

Relation apply_updates(const Relation& g, const std::vector<SignedUpdate>& updates) {
  std::map<Tuple, Weight> acc;
  for (const auto& t : g.tuples) acc[t] = 1;
  for (const auto& u : updates) acc[u.tuple] += u.weight;
  Relation out;
  out.arity = g.arity;
  for (const auto& [t, w] : acc) {
    if (w > 0) out.tuples.push_back(t);
  }
  return out;
}

std::vector<SignedUpdate> random_update_stream(const Relation& base, std::size_t nv,
                                               std::size_t batches, std::size_t per_batch,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::set<Tuple> present(base.tuples.begin(), base.tuples.end());
  std::vector<SignedUpdate> out;
  for (std::size_t b = 0; b < batches; ++b) {
    std::set<Tuple> touched;
    for (std::size_t k = 0; k < per_batch; ++k) {
      const Value u = uniform_below(rng, nv);
      const Value v = uniform_below(rng, nv);
      Tuple t{u, v};
      if (u == v || !touched.insert(t).second) continue;
      out.push_back({t, b, present.count(t) ? -1 : 1});
    }
    for (const auto& t : touched) {
      if (!present.erase(t)) present.insert(t);
    }
  }
  return out;
}

std::vector<SignedUpdate> insertion_stream(const Relation& g, std::size_t batches,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Tuple> edges(g.tuples);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t i = edges.size(); i > 1; --i) {
    std::swap(edges[i - 1], edges[uniform_below(rng, i)]);
  }
  std::vector<SignedUpdate> out;
  const std::size_t n = edges.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({edges[i], static_cast<Timestamp>(i * batches / std::max<std::size_t>(n, 1)), 1});
  }
  return out;
}

}  // namespace wcoj::testkit
