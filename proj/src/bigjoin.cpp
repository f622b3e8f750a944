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

#include "wcoj/bigjoin.hpp"

#include <algorithm>

namespace wcoj::bigjoin {

std::optional<Decision> schedule(const std::vector<std::vector<std::uint64_t>>& work,
                                 std::size_t batch_per_worker, ScheduleRule rule) {
  std::optional<std::size_t> nonempty;
  for (std::size_t s = work.size(); s-- > 0;) {
    const auto& row = work[s];
    if (row.empty()) continue;
    const bool meets =
        rule == ScheduleRule::AnyWorker
            ? std::any_of(row.begin(), row.end(), [&](auto x) { return x >= batch_per_worker; })
            : std::all_of(row.begin(), row.end(), [&](auto x) { return x >= batch_per_worker; });
    if (meets) return Decision{s, true};
    if (!nonempty && std::any_of(row.begin(), row.end(), [](auto x) { return x > 0; })) {
      nonempty = s;
    }
  }
  if (nonempty) return Decision{*nonempty, false};
  return std::nullopt;
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

const Binding& binding_of(const QueryPlan& plan, RelationId r, std::size_t level) {
  const Binding* b = plan.binding(r, level);
  if (b == nullptr) throw MissingIndex("relation does not bind this level");
  return *b;
}

Tuple key_with(const Binding& b, KeyView prefix, Value last) {
  Tuple k = extract_key(b, prefix);
  k.push_back(last);
  return k;
}

}  // namespace

CountTriple count_minimize(const QueryPlan& plan, const ViewTable& views, std::size_t level,
                           CountTriple triple) {
  for (const Binding& b : plan.level(level).bindings) {
    const std::size_t c = view_for(views, b).count(extract_key(b, triple.prefix.values));
    if (c < triple.min_count) {
      triple.min_count = c;
      triple.min_relation = b.relation;
    }
    if (c == 0) break;
  }
  return triple;
}

std::size_t propose(const QueryPlan& plan, const ViewTable& views, std::size_t level,
                    std::deque<ProposalQuad>& queue, std::size_t budget,
                    std::vector<CandidateExtension>& out) {
  std::size_t used = 0;
  std::vector<Value> values;
  std::vector<Weight> weights;
  Tuple extended;
  while (used < budget && !queue.empty()) {
    ProposalQuad& quad = queue.front();
    const Binding& b = binding_of(plan, quad.min_relation, level);
    const std::size_t take = std::min(budget - used, quad.remaining());
    values.clear();
    weights.clear();
    const Tuple key = extract_key(b, quad.prefix.values);
    view_for(views, b).enumerate(key, quad.cursor, quad.cursor + take, values, &weights);
    extended = quad.prefix.values;
    extended.push_back(0);
    for (std::size_t k = 0; k < values.size(); ++k) {
      extended.back() = values[k];
      if (!plan.passes_filters(level, extended)) continue;
      Weight w = quad.prefix.weight;
      if (b.last) w *= weights[k];
      out.push_back({Prefix{quad.prefix.values, w}, values[k], quad.min_relation});
    }
    quad.cursor += take;
    used += take;
    if (quad.remaining() == 0) queue.pop_front();
  }
  return used;
}

namespace {

class Dataflow {
 public:
  Dataflow(const QueryPlan& plan, const ViewTable& views, Runtime& rt,
           std::vector<WeightedTuple>& out)
      : plan_(plan),
        views_(views),
        rt_(rt),
        out_(out),
        m_(plan.num_levels()),
        workers_(rt.workers()),
        queues_(m_, std::vector<std::deque<ProposalQuad>>(workers_)),
        work_(m_ + 1, std::vector<std::uint64_t>(workers_, 0)),
        level_quads_(m_, 0),
        seeds_(workers_),
        seed_head_(workers_, 0) {}

  RunStats run(SeedSpec spec) {
    seed_length_ = spec.seeds.empty() ? 0 : spec.seeds.front().values.size();
    for (std::size_t l = 0; l < seed_length_; ++l) {
      for (const Binding& b : plan_.level(l).bindings) {
        if (std::find(spec.seed_relations.begin(), spec.seed_relations.end(), b.relation) ==
            spec.seed_relations.end()) {
          checks_.push_back({l, b});
        }
      }
    }
    for (auto& p : spec.seeds) {
      const WorkerId w = rt_.owner(p.values);
      seeds_[w].push_back(std::move(p));
      ++work_[0][w];
    }
    const std::size_t bprime = rt_.config().batch_per_worker;
    while (auto d = schedule(work_, bprime, ScheduleRule::AnyWorker)) {
      rt_.set_full(d->full);
      ++stats_.steps;
      if (d->stage == 0) {
        seed_step();
      } else {
        propose_step(d->stage - 1);
      }
      if (dirty_) close_round(0);
    }
    return stats_;
  }

 private:
  using Held = std::vector<std::vector<Prefix>>;

  struct Check {
    std::size_t level;
    Binding binding;
  };

  void charge(WorkerId w, std::uint64_t probes) {
    rt_.record_work(w, probes);
    dirty_ = true;
  }

  void close_round(std::uint64_t in_flight) {
    for (WorkerId w = 0; w < workers_; ++w) {
      std::uint64_t stored = seeds_[w].size() - seed_head_[w];
      for (std::size_t l = 0; l < m_; ++l) stored += queues_[l][w].size();
      rt_.record_stored(w, stored);
    }
    stats_.max_queued_candidates = std::max(stats_.max_queued_candidates, in_flight);
    for (auto q : level_quads_) stats_.max_level_quads = std::max(stats_.max_level_quads, q);
    rt_.barrier();
    dirty_ = false;
  }

  template <class T, class KeyFn>
  std::pair<std::vector<std::vector<T>>, std::uint64_t> route(std::vector<std::vector<T>> held,
                                                                KeyFn key_of) {
    std::vector<Envelope<T>> env;
    for (auto& items : held) {
      for (auto& item : items) {
        const WorkerId dest = rt_.owner(key_of(item));
        env.push_back({dest, std::move(item)});
      }
    }
    const std::uint64_t n = env.size();
    return {rt_.exchange(std::move(env)), n};
  }

  void seed_step() {
    const std::size_t bprime = rt_.config().batch_per_worker;
    Held batch(workers_);
    for (WorkerId w = 0; w < workers_; ++w) {
      auto& pending = seeds_[w];
      const std::size_t take = std::min(bprime, pending.size() - seed_head_[w]);
      for (std::size_t k = 0; k < take; ++k) {
        Prefix p = std::move(pending[seed_head_[w] + k]);
        bool ok = true;
        for (std::size_t l = 0; l < seed_length_ && ok; ++l) ok = plan_.passes_filters(l, p.values);
        if (ok) batch[w].push_back(std::move(p));
      }
      seed_head_[w] += take;
      work_[0][w] -= take;
      if (seed_head_[w] == pending.size()) {
        pending.clear();
        seed_head_[w] = 0;
      }
    }
    for (const Check& c : checks_) {
      const ExtensionView& view = view_for(views_, c.binding);
      auto [inbox, n] = route(std::move(batch), [&](const Prefix& p) {
        return key_with(c.binding, p.values, p.values[c.level]);
      });
      batch.assign(workers_, {});
      for (WorkerId w = 0; w < workers_; ++w) {
        for (auto& p : inbox[w]) {
          const Weight mult = view.multiplicity(extract_key(c.binding, p.values), p.values[c.level]);
          ++stats_.probes.membership_probes;
          charge(w, 1);
          if (mult == 0) continue;
          if (c.binding.last) p.weight *= mult;
          batch[w].push_back(std::move(p));
        }
      }
      close_round(n);
    }
    after_extension(seed_length_, std::move(batch));
  }

  void propose_step(std::size_t level) {
    const std::size_t bprime = rt_.config().batch_per_worker;
    const LevelPlan& lp = plan_.level(level);
    std::vector<std::vector<CandidateExtension>> held(workers_);
    for (WorkerId w = 0; w < workers_; ++w) {
      auto& queue = queues_[level][w];
      const std::size_t before = queue.size();
      const std::size_t used = propose(plan_, views_, level, queue, bprime, held[w]);
      level_quads_[level] -= before - queue.size();
      work_[level + 1][w] -= used;
      stats_.probes.proposals += used;
      if (used > 0) charge(w, used);
    }
    for (const Binding& b : lp.bindings) {
      const ExtensionView& view = view_for(views_, b);
      std::vector<std::vector<CandidateExtension>> stay(workers_), moving(workers_);
      for (WorkerId w = 0; w < workers_; ++w) {
        for (auto& c : held[w]) (c.min_relation == b.relation ? stay : moving)[w].push_back(std::move(c));
      }
      auto [inbox, n] = route(std::move(moving), [&](const CandidateExtension& c) {
        return extract_key(b, c.prefix.values);
      });
      std::uint64_t in_flight = n;
      for (WorkerId w = 0; w < workers_; ++w) {
        held[w] = std::move(stay[w]);
        in_flight += held[w].size();
        for (auto& c : inbox[w]) {
          const Weight mult = view.multiplicity(extract_key(b, c.prefix.values), c.value);
          ++stats_.probes.membership_probes;
          charge(w, 1);
          if (mult == 0) continue;
          if (b.last) c.prefix.weight *= mult;
          held[w].push_back(std::move(c));
        }
      }
      close_round(in_flight);
    }
    Held survivors(workers_);
    for (WorkerId w = 0; w < workers_; ++w) {
      for (auto& c : held[w]) {
        c.prefix.values.push_back(c.value);
        survivors[w].push_back(std::move(c.prefix));
      }
    }
    after_extension(level + 1, std::move(survivors));
  }

  void after_extension(std::size_t level, Held items) {
    if (level == m_) {
      for (auto& batch : items) {
        for (auto& p : batch) {
          if (p.weight == 0) continue;
          out_.push_back({plan_.to_attribute_order(p.values), p.weight});
          ++stats_.outputs;
        }
      }
      return;
    }
    count_minimize(level, std::move(items));
  }

  void count_minimize(std::size_t level, Held items) {
    const LevelPlan& lp = plan_.level(level);
    std::vector<std::vector<CountTriple>> held(workers_);
    for (WorkerId w = 0; w < workers_; ++w) {
      for (auto& p : items[w]) held[w].push_back({std::move(p)});
    }
    for (const Binding& b : lp.bindings) {
      const ExtensionView& view = view_for(views_, b);
      auto [inbox, n] = route(std::move(held), [&](const CountTriple& t) {
        return extract_key(b, t.prefix.values);
      });
      held.assign(workers_, {});
      for (WorkerId w = 0; w < workers_; ++w) {
        for (auto& t : inbox[w]) {
          const std::size_t c = view.count(extract_key(b, t.prefix.values));
          ++stats_.probes.count_reads;
          charge(w, 1);
          if (c == 0) continue;
          if (c < t.min_count) {
            t.min_count = c;
            t.min_relation = b.relation;
          }
          held[w].push_back(std::move(t));
        }
      }
      close_round(n);
    }
    auto [inbox, n] = route(std::move(held), [&](const CountTriple& t) {
      return extract_key(binding_of(plan_, t.min_relation, level), t.prefix.values);
    });
    for (WorkerId w = 0; w < workers_; ++w) {
      for (auto& t : inbox[w]) {
        work_[level + 1][w] += t.min_count;
        ++level_quads_[level];
        queues_[level][w].push_back({std::move(t.prefix), t.min_count, t.min_relation, 0});
      }
    }
    close_round(n);
  }

  const QueryPlan& plan_;
  const ViewTable& views_;
  Runtime& rt_;
  std::vector<WeightedTuple>& out_;
  std::size_t m_;
  std::size_t workers_;
  std::vector<std::vector<std::deque<ProposalQuad>>> queues_;
  // Row 0 counts pending seeds; row 1 + l counts unproposed extensions at level l.
  std::vector<std::vector<std::uint64_t>> work_;
  std::vector<std::uint64_t> level_quads_;
  std::vector<std::vector<Prefix>> seeds_;
  std::vector<std::size_t> seed_head_;
  std::size_t seed_length_ = 0;
  std::vector<Check> checks_;
  RunStats stats_;
  bool dirty_ = false;
};

}  // namespace

SeedSpec static_seeds(const QueryPlan& plan, const IndexCatalog& catalog) {
  const Query& q = plan.query();
  if (plan.num_levels() >= 2) {
    for (RelationId i = 0; i < q.num_relations(); ++i) {
      const auto& attrs = plan.ordered_attributes(i);
      if (attrs.size() < 2 || attrs[0] != q.order[0] || attrs[1] != q.order[1]) continue;
      SeedSpec spec;
      spec.seed_relations = {i};
      for (const auto& [key, entry] : catalog.index(i, 1).entries()) {
        for (Value v : entry.values) spec.seeds.push_back({{key[0], v}, 1});
      }
      std::sort(spec.seeds.begin(), spec.seeds.end(),
                [](const Prefix& a, const Prefix& b) { return a.values < b.values; });
      return spec;
    }
  }
  return SeedSpec{{Prefix{{}, 1}}, {}};
}

RunStats run_dataflow(const QueryPlan& plan, const ViewTable& views, SeedSpec seeds,
                      Runtime& runtime, std::vector<WeightedTuple>& out) {
  Dataflow flow(plan, views, runtime, out);
  return flow.run(std::move(seeds));
}

std::vector<Tuple> StaticResult::sorted_tuples() const {
  std::vector<Tuple> out;
  for (const auto& t : tuples) out.push_back(t.tuple);
  std::sort(out.begin(), out.end());
  return out;
}

StaticResult run_static(const Query& q, const Database& db, const WorkerConfig& config) {
  QueryPlan plan(q);
  IndexCatalog catalog(plan, db);
  Runtime rt(config);
  rt.set_indexed(catalog.indexed_per_worker(config.workers, config.hash_seed));
  StaticResult result;
  const ViewTable views = catalog.views();
  result.stats = run_dataflow(plan, views, static_seeds(plan, catalog), rt, result.tuples);
  std::sort(result.tuples.begin(), result.tuples.end());
  result.ledger = rt.ledger();
  return result;
}

}  // namespace wcoj::bigjoin
