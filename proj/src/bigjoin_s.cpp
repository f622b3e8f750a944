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

#include "wcoj/bigjoin_s.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace wcoj::bigjoin_s {

std::uint32_t LookupBatch::add(const Tuple& key, std::uint32_t requester) {
  ++registered_;
  auto [it, inserted] = slots_.try_emplace(key, static_cast<std::uint32_t>(keys_.size()));
  if (inserted) {
    keys_.push_back(key);
    requesters_.emplace_back();
  }
  requesters_[it->second].push_back(requester);
  return it->second;
}

std::vector<BalanceSlice> balance_split(const std::vector<std::size_t>& counts, WorkerId sender,
                                        std::size_t workers) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return balance_split(counts, 0, total, workers,
                       static_cast<WorkerId>((sender + 1) % workers));
}

std::vector<BalanceSlice> balance_split(const std::vector<std::size_t>& counts,
                                        std::size_t offset, std::size_t total,
                                        std::size_t workers, WorkerId first_receiver) {
  std::vector<BalanceSlice> out;
  const std::size_t share = total / workers;
  const std::size_t extra = total % workers;
  std::size_t t = 0;
  std::size_t base = offset;  // global position of counts[t]'s first unit
  std::size_t lo = 0;
  for (std::size_t k = 0; k < workers && t < counts.size(); ++k) {
    const auto receiver = static_cast<WorkerId>((first_receiver + k) % workers);
    const std::size_t hi = lo + share + (k < extra ? 1 : 0);
    while (t < counts.size()) {
      const std::size_t start = std::max(lo, base);
      const std::size_t end = std::min(hi, base + counts[t]);
      if (start < end) out.push_back({receiver, t, start - base, end - base});
      if (base + counts[t] > hi) break;
      base += counts[t];
      ++t;
    }
    lo = hi;
  }
  return out;
}

std::vector<Tuple> BalancedResult::sorted_tuples() const {
  std::vector<Tuple> out;
  for (const auto& t : tuples) out.push_back(t.tuple);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

enum class Lookup { Resolve, Member, Count };

// Composite lookup keys are laid out as [relation, rank, key..., arg?].
struct Request {
  WorkerId from = 0;
  std::uint32_t slot = 0;
  Tuple composite;
};

struct Response {
  std::uint32_t slot = 0;
  Value value = 0;
};

struct Held {
  Prefix prefix;
  RelationId min_relation = kNoRelation;
  std::size_t position = 0;
  std::size_t min_count = std::numeric_limits<std::size_t>::max();
};

using TripleTable = std::vector<std::vector<const SkewTriple*>>;

Tuple composite(const Binding& b, KeyView prefix) {
  Tuple c{b.relation, b.rank};
  for (std::size_t p : b.key_positions) c.push_back(prefix[p]);
  return c;
}

class BalancedFlow {
 public:
  BalancedFlow(const QueryPlan& plan, const TripleTable& triples, Runtime& rt,
               std::vector<WeightedTuple>& out)
      : plan_(plan),
        triples_(triples),
        rt_(rt),
        out_(out),
        m_(plan.num_levels()),
        workers_(rt.workers()),
        queues_(m_, std::vector<std::deque<BalancedQuad>>(workers_)),
        work_(m_, std::vector<std::uint64_t>(workers_, 0)),
        level_quads_(m_, 0),
        held_(workers_, 0),
        rotation_(m_, 0) {}

  RunStats run() {
    std::vector<std::vector<Held>> start(workers_);
    start[rt_.owner(Tuple{})].push_back({Prefix{{}, 1}});
    count_and_balance(0, std::move(start));
    const std::size_t bprime = rt_.config().batch_per_worker;
    while (auto d = bigjoin::schedule(work_, bprime, bigjoin::ScheduleRule::AllWorkers)) {
      rt_.set_full(d->full);
      ++stats_.steps;
      step(d->stage);
    }
    return stats_;
  }

 private:
  const SkewTriple& triple(const Tuple& comp) const {
    return *triples_.at(comp[0]).at(comp[1]);
  }

  void close_round(std::uint64_t in_flight) {
    for (WorkerId w = 0; w < workers_; ++w) {
      std::uint64_t stored = held_[w];
      for (std::size_t l = 0; l < m_; ++l) stored += queues_[l][w].size();
      rt_.record_stored(w, stored);
    }
    stats_.max_queued_candidates = std::max(stats_.max_queued_candidates, in_flight);
    for (auto q : level_quads_) stats_.max_level_quads = std::max(stats_.max_level_quads, q);
    rt_.barrier();
  }

  void set_held(const std::vector<std::vector<Held>>& items) {
    for (WorkerId w = 0; w < workers_; ++w) held_[w] = items[w].size();
  }

  std::uint64_t total_held() const {
    std::uint64_t n = 0;
    for (auto h : held_) n += h;
    return n;
  }

  // One request round and one response round. answers[w][slot].
  std::vector<std::vector<Value>> lookup(Lookup kind, const std::vector<LookupBatch>& batches) {
    std::vector<Envelope<Request>> requests;
    for (WorkerId w = 0; w < workers_; ++w) {
      const LookupBatch& batch = batches[w];
      stats_.lookups_registered += batch.registered();
      for (std::uint32_t slot = 0; slot < batch.size(); ++slot) {
        const Tuple& comp = batch.key(slot);
        const SkewTriple& t = triple(comp);
        const KeyView full(comp.data() + 2, comp.size() - 2);
        WorkerId dest = 0;
        switch (kind) {
          case Lookup::Resolve:
            dest = t.resolver_owner(full.first(full.size() - 1), full.back());
            break;
          case Lookup::Member:
            dest = t.membership_owner(full.first(full.size() - 1), full.back());
            break;
          case Lookup::Count:
            dest = t.count_owner(full);
            break;
        }
        requests.push_back({dest, Request{w, slot, comp}});
      }
    }
    std::vector<std::vector<Value>> answers(workers_);
    for (WorkerId w = 0; w < workers_; ++w) answers[w].assign(batches[w].size(), 0);
    if (requests.empty()) return answers;
    stats_.requests_sent += requests.size();

    const std::uint64_t sent = requests.size();
    auto inbox = rt_.exchange(std::move(requests));
    std::vector<Envelope<Response>> responses;
    for (WorkerId w = 0; w < workers_; ++w) {
      for (const Request& r : inbox[w]) {
        const SkewTriple& t = triple(r.composite);
        const KeyView full(r.composite.data() + 2, r.composite.size() - 2);
        Value v = 0;
        switch (kind) {
          case Lookup::Resolve: {
            auto e = t.resolve(w, full.first(full.size() - 1), full.back());
            if (!e) throw ResolverMiss("resolver has no entry for a requested position");
            v = *e;
            ++stats_.probes.proposals;
            break;
          }
          case Lookup::Member:
            v = t.contains(w, full.first(full.size() - 1), full.back()) ? 1 : 0;
            ++stats_.probes.membership_probes;
            break;
          case Lookup::Count:
            v = t.count(w, full);
            ++stats_.probes.count_reads;
            break;
        }
        rt_.record_work(w, 1);
        responses.push_back({r.from, Response{r.slot, v}});
      }
    }
    close_round(sent + total_held());
    const std::uint64_t replies = responses.size();
    auto back = rt_.exchange(std::move(responses));
    for (WorkerId w = 0; w < workers_; ++w) {
      for (const Response& r : back[w]) answers[w][r.slot] = r.value;
    }
    close_round(replies + total_held());
    return answers;
  }

  void step(std::size_t level) {
    const std::size_t bprime = rt_.config().batch_per_worker;
    const LevelPlan& lp = plan_.level(level);

    // Extension-Resolve: exactly B' units per worker, or all that remain.
    std::vector<std::vector<Held>> cands(workers_);
    std::vector<LookupBatch> batches(workers_);
    for (WorkerId w = 0; w < workers_; ++w) {
      auto& queue = queues_[level][w];
      std::size_t budget = bprime;
      while (budget > 0 && !queue.empty()) {
        BalancedQuad& q = queue.front();
        const Binding* b = plan_.binding(q.min_relation, level);
        const std::size_t take = std::min(budget, q.size());
        Tuple comp = composite(*b, q.prefix.values);
        comp.push_back(0);
        for (std::size_t k = q.start; k < q.start + take; ++k) {
          comp.back() = k + 1;
          const auto idx = static_cast<std::uint32_t>(cands[w].size());
          cands[w].push_back({q.prefix, q.min_relation, k});
          batches[w].add(comp, idx);
        }
        q.start += take;
        budget -= take;
        work_[level][w] -= take;
        if (q.size() == 0) {
          queue.pop_front();
          --level_quads_[level];
        }
      }
    }
    set_held(cands);
    auto values = lookup(Lookup::Resolve, batches);
    for (WorkerId w = 0; w < workers_; ++w) {
      std::vector<Held> kept;
      for (std::uint32_t slot = 0; slot < batches[w].size(); ++slot) {
        for (auto idx : batches[w].requesters(slot)) cands[w][idx].prefix.values.push_back(values[w][slot]);
      }
      for (auto& c : cands[w]) {
        if (plan_.passes_filters(level, c.prefix.values)) kept.push_back(std::move(c));
      }
      cands[w] = std::move(kept);
    }
    set_held(cands);

    // Managed intersect, relation by relation; survivors stay put.
    for (const Binding& b : lp.bindings) {
      std::vector<LookupBatch> member(workers_);
      for (WorkerId w = 0; w < workers_; ++w) {
        for (std::uint32_t idx = 0; idx < cands[w].size(); ++idx) {
          const Held& c = cands[w][idx];
          if (c.min_relation == b.relation) continue;
          Tuple comp = composite(b, c.prefix.values);
          comp.push_back(c.prefix.values[level]);
          member[w].add(comp, idx);
        }
      }
      auto answers = lookup(Lookup::Member, member);
      for (WorkerId w = 0; w < workers_; ++w) {
        std::vector<char> drop(cands[w].size(), 0);
        for (std::uint32_t slot = 0; slot < member[w].size(); ++slot) {
          if (answers[w][slot] != 0) continue;
          for (auto idx : member[w].requesters(slot)) drop[idx] = 1;
        }
        std::vector<Held> kept;
        for (std::size_t i = 0; i < cands[w].size(); ++i) {
          if (!drop[i]) kept.push_back(std::move(cands[w][i]));
        }
        cands[w] = std::move(kept);
      }
      set_held(cands);
    }

    if (level + 1 == m_) {
      for (auto& items : cands) {
        for (auto& c : items) {
          out_.push_back({plan_.to_attribute_order(c.prefix.values), c.prefix.weight});
          ++stats_.outputs;
        }
      }
      held_.assign(workers_, 0);
      return;
    }
    for (auto& items : cands) {
      for (auto& c : items) {
        c.min_relation = kNoRelation;
        c.min_count = std::numeric_limits<std::size_t>::max();
      }
    }
    count_and_balance(level + 1, std::move(cands));
  }

  void count_and_balance(std::size_t level, std::vector<std::vector<Held>> items) {
    const LevelPlan& lp = plan_.level(level);
    set_held(items);
    for (const Binding& b : lp.bindings) {
      std::vector<LookupBatch> batches(workers_);
      for (WorkerId w = 0; w < workers_; ++w) {
        for (std::uint32_t idx = 0; idx < items[w].size(); ++idx) {
          batches[w].add(composite(b, items[w][idx].prefix.values), idx);
        }
      }
      auto answers = lookup(Lookup::Count, batches);
      for (WorkerId w = 0; w < workers_; ++w) {
        for (std::uint32_t slot = 0; slot < batches[w].size(); ++slot) {
          const std::size_t c = answers[w][slot];
          for (auto idx : batches[w].requesters(slot)) {
            Held& h = items[w][idx];
            if (c < h.min_count) {
              h.min_count = c;
              h.min_relation = b.relation;
            }
          }
        }
        std::vector<Held> kept;
        for (auto& h : items[w]) {
          if (h.min_count > 0) kept.push_back(std::move(h));
        }
        items[w] = std::move(kept);
      }
      set_held(items);
    }

    // Balance. With B' >= w each sender splits its own work over all workers;
    // otherwise workers announce their totals and split one global range,
    // rotating the receivers of the extra units.
    const bool per_sender = rt_.config().batch_per_worker >= workers_;
    std::vector<std::uint64_t> totals(workers_, 0);
    std::uint64_t total = 0;
    for (WorkerId s = 0; s < workers_; ++s) {
      for (const auto& h : items[s]) totals[s] += h.min_count;
      total += totals[s];
    }
    if (total == 0) {
      held_.assign(workers_, 0);
      return;
    }
    WorkerId first = 0;
    if (!per_sender) {
      std::vector<Envelope<std::uint64_t>> announce;
      for (WorkerId s = 0; s < workers_; ++s) {
        for (WorkerId r = 0; r < workers_; ++r) announce.push_back({r, totals[s]});
      }
      rt_.exchange(std::move(announce));
      close_round(total_held());
      first = rotation_[level];
      rotation_[level] = static_cast<WorkerId>((first + total % workers_) % workers_);
    }
    std::vector<Envelope<BalancedQuad>> env;
    std::vector<std::uint64_t> assigned(workers_, 0);
    std::uint64_t offset = 0;
    for (WorkerId s = 0; s < workers_; ++s) {
      std::vector<std::size_t> counts;
      for (const auto& h : items[s]) counts.push_back(h.min_count);
      const auto slices = per_sender ? balance_split(counts, s, workers_)
                                     : balance_split(counts, offset, total, workers_, first);
      for (const auto& slice : slices) {
        const Held& h = items[s][slice.triple];
        env.push_back({slice.receiver, BalancedQuad{h.prefix, h.min_relation, slice.start, slice.end}});
        assigned[slice.receiver] += slice.end - slice.start;
      }
      offset += totals[s];
    }
    const double mean = static_cast<double>(total) / static_cast<double>(workers_);
    for (auto a : assigned) {
      stats_.max_balance_deviation =
          std::max(stats_.max_balance_deviation, std::abs(static_cast<double>(a) - mean));
    }
    const std::uint64_t sent = env.size();
    auto inbox = rt_.exchange(std::move(env));
    held_.assign(workers_, 0);
    for (WorkerId w = 0; w < workers_; ++w) {
      for (auto& q : inbox[w]) {
        work_[level][w] += q.size();
        ++level_quads_[level];
        queues_[level][w].push_back(std::move(q));
      }
    }
    close_round(sent);
  }

  const QueryPlan& plan_;
  const TripleTable& triples_;
  Runtime& rt_;
  std::vector<WeightedTuple>& out_;
  std::size_t m_;
  std::size_t workers_;
  std::vector<std::vector<std::deque<BalancedQuad>>> queues_;
  std::vector<std::vector<std::uint64_t>> work_;
  std::vector<std::uint64_t> level_quads_;
  std::vector<std::uint64_t> held_;
  std::vector<WorkerId> rotation_;
  RunStats stats_;
};

}  // namespace

BalancedResult run_static_balanced(const Query& q, const Database& db,
                                   const WorkerConfig& config) {
  config.validate();
  QueryPlan plan(q);
  IndexCatalog catalog(plan, db);
  std::map<const RelationIndex*, std::vector<SkewTriple>> physical;
  TripleTable table;
  for (RelationId i = 0; i < q.num_relations(); ++i) {
    const RelationIndex* ri = &catalog.relation(i);
    auto it = physical.find(ri);
    if (it == physical.end()) {
      it = physical.emplace(ri, build_skew_triple(*ri, config.workers, config.hash_seed)).first;
    }
    std::vector<const SkewTriple*> ranks;
    for (const auto& t : it->second) ranks.push_back(&t);
    table.push_back(std::move(ranks));
  }
  Runtime rt(config);
  std::vector<std::uint64_t> indexed(config.workers, 0);
  for (const auto& [ri, triples] : physical) {
    for (const auto& t : triples) {
      const auto sizes = t.shard_sizes();
      for (std::size_t w = 0; w < sizes.size(); ++w) indexed[w] += sizes[w];
    }
  }
  rt.set_indexed(indexed);

  BalancedResult result;
  BalancedFlow flow(plan, table, rt, result.tuples);
  result.stats = flow.run();
  std::sort(result.tuples.begin(), result.tuples.end());
  result.ledger = rt.ledger();
  return result;
}

}  // namespace wcoj::bigjoin_s
