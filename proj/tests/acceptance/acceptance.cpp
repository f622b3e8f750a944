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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "wcoj/bigjoin.hpp"
#include "wcoj/bigjoin_s.hpp"
#include "wcoj/delta.hpp"
#include "wcoj/front.hpp"
#include "wcoj/gj.hpp"
#include "wcoj/index.hpp"
#include "wcoj/mvindex.hpp"
#include "wcoj/testkit.hpp"

using namespace wcoj;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures.size() < 5) failures.push_back(what);
  }
};

Query named(const std::string& name) { return front::parse_query(front::standard_query(name)); }

const std::vector<std::string> kQueries{"triangle", "diamond", "4-clique"};

Relation er_graph(std::uint64_t seed) {
  return testkit::erdos_renyi(8 + seed % 18, 0.2, seed);
}

std::string show(const std::vector<Tuple>& ts) {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < ts.size(); ++k) {
    os << (k ? "," : "") << "(";
    for (std::size_t c = 0; c < ts[k].size(); ++c) os << (c ? "," : "") << ts[k][c];
    os << ")";
  }
  os << "}";
  return os.str();
}

std::vector<Tuple> level_tuples(const PrefixSet& level) {
  std::vector<Tuple> out;
  for (const auto& p : level) out.push_back(p.values);
  std::sort(out.begin(), out.end());
  return out;
}

std::set<Value> ext(const IndexCatalog& c, RelationId i, std::size_t level, const Tuple& p) {
  const auto v = c.enumerate(i, level, p, 0, c.count(i, level, p));
  return {v.begin(), v.end()};
}

std::vector<WeightedTuple> as_weighted(const std::vector<delta::OutputDelta>& d) {
  std::vector<WeightedTuple> out;
  for (const auto& x : d) out.push_back({x.tuple, x.weight});
  return out;
}

// Shared between criteria 2, 4 and 7.
struct StaticSweep {
  bool ran = false;
  std::uint64_t runs = 0;
  std::uint64_t queue_violations = 0;
  std::uint64_t quad_violations = 0;
  std::uint64_t inventory_violations = 0;
  std::uint64_t peak_queue_ratio_num = 0, peak_queue_ratio_den = 1;
};

StaticSweep sweep;

Outcome sample_graph() {
  Outcome o;
  const Query q = named("triangle");
  const Database db = testkit::graph_db(testkit::sample_graph());
  QueryPlan plan(q);
  IndexCatalog c(plan, db);
  const Tuple e{};
  o.require(ext(c, 0, 0, e) == std::set<Value>{1, 2, 3, 4, 5, 6, 7}, "Ext1 at level 1");
  o.require(ext(c, 2, 0, e) == std::set<Value>{1, 6, 7, 8, 9, 10, 11}, "Ext3 at level 1");
  o.require(ext(c, 0, 1, {1}) == std::set<Value>{6}, "Ext1 at level 2");
  o.require(ext(c, 1, 2, {1, 6}) == std::set<Value>{7, 8, 9, 10, 11}, "Ext2 at level 3");
  o.require(ext(c, 2, 2, {1, 6}) == std::set<Value>{7}, "Ext3 at level 3");
  const auto r = gj::run(q, db, {true});
  o.require(r.levels.size() == 4, "level count");
  if (r.levels.size() == 4) {
    o.require(level_tuples(r.levels[1]) == std::vector<Tuple>{{1}, {6}, {7}},
              "P1 = " + show(level_tuples(r.levels[1])));
    o.require(level_tuples(r.levels[2]) == std::vector<Tuple>{{1, 6}, {6, 7}, {7, 1}},
              "P2 = " + show(level_tuples(r.levels[2])));
  }
  o.require(r.sorted_tuples() == std::vector<Tuple>{{1, 6, 7}, {6, 7, 1}, {7, 1, 6}},
            "output = " + show(r.sorted_tuples()));
  o.detail = "P1=" + show(level_tuples(r.levels.at(1))) + " P2=" + show(level_tuples(r.levels.at(2))) +
             " out=" + show(r.sorted_tuples());
  return o;
}

Outcome oracle_static() {
  Outcome o;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Database db = testkit::graph_db(er_graph(seed));
    for (const auto& name : kQueries) {
      const Query q = named(name);
      const auto oracle = testkit::oracle_join(q, db);
      auto serial = gj::run(q, db).tuples;
      std::sort(serial.begin(), serial.end());
      o.require(serial == oracle, "gj " + name + " seed " + std::to_string(seed));
      for (std::size_t w : {1, 2, 4}) {
        for (std::size_t bp : {1, 3, 16}) {
          const WorkerConfig config{w, seed, bp};
          const std::string tag = name + " seed " + std::to_string(seed) + " w " +
                                  std::to_string(w) + " B' " + std::to_string(bp);
          const auto s = bigjoin::run_static(q, db, config);
          o.require(s.tuples == oracle, "bigjoin " + tag);
          const auto b = bigjoin_s::run_static_balanced(q, db, config);
          o.require(b.tuples == oracle, "bigjoin-s " + tag);
          const std::uint64_t batch = config.batch();
          ++sweep.runs;
          if (s.stats.max_queued_candidates > batch) ++sweep.queue_violations;
          if (s.stats.max_level_quads > 2 * batch) ++sweep.quad_violations;
          if (b.stats.max_level_quads > 4 * batch) ++sweep.inventory_violations;
          if (s.stats.max_queued_candidates * sweep.peak_queue_ratio_den >
              sweep.peak_queue_ratio_num * batch) {
            sweep.peak_queue_ratio_num = s.stats.max_queued_candidates;
            sweep.peak_queue_ratio_den = batch;
          }
        }
      }
    }
  }
  sweep.ran = true;
  o.detail = std::to_string(sweep.runs) + " configurations x 2 engines";
  return o;
}

Outcome delta_correctness() {
  Outcome o;
  std::uint64_t batches_checked = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t nv = 8 + seed % 18;
    const Relation base = er_graph(seed);
    const auto stream = testkit::random_update_stream(base, nv, 10, 8, 1000 + seed);
    const auto batches = delta::group_by_time(stream);
    const Relation final_graph = testkit::apply_updates(base, stream);
    for (const auto& name : kQueries) {
      const Query q = named(name);
      const auto final_oracle = testkit::oracle_join(q, testkit::graph_db(final_graph));
      for (std::size_t w : {1, 2, 4}) {
        delta::DeltaBigJoin engine(q, {w, seed, 4});
        engine.load(testkit::graph_db(base));
        std::vector<WeightedTuple> acc = testkit::oracle_join(q, testkit::graph_db(base));
        Relation g = base;
        for (const auto& b : batches) {
          const Relation next = testkit::apply_updates(g, b.updates.at("e"));
          const auto expected =
              testkit::oracle_diff(q, testkit::graph_db(g), testkit::graph_db(next));
          const auto got = as_weighted(delta::run_delta_batch(engine, b.updates, b.time));
          o.require(got == expected, name + " seed " + std::to_string(seed) + " w " +
                                         std::to_string(w) + " t " + std::to_string(b.time));
          acc.insert(acc.end(), got.begin(), got.end());
          g = next;
          ++batches_checked;
        }
        o.require(consolidate(acc) == final_oracle,
                  "final " + name + " seed " + std::to_string(seed) + " w " + std::to_string(w));
      }
      auto serial = delta::accumulate(
          delta::run_delta_serial(q, testkit::graph_db(base), batches));
      auto initial = testkit::oracle_join(q, testkit::graph_db(base));
      serial.insert(serial.end(), initial.begin(), initial.end());
      o.require(consolidate(serial) == final_oracle,
                "serial final " + name + " seed " + std::to_string(seed));
    }
  }
  o.detail = std::to_string(batches_checked) + " batch deltas";
  return o;
}

Outcome batching_memory() {
  Outcome o;
  if (!sweep.ran) {
    o.require(false, "static sweep did not run");
    return o;
  }
  o.require(sweep.queue_violations == 0,
            std::to_string(sweep.queue_violations) + " runs exceeded B queued candidates");
  o.require(sweep.quad_violations == 0,
            std::to_string(sweep.quad_violations) + " runs exceeded 2B quads per level");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%llu runs, peak queued/B = %llu/%llu",
                static_cast<unsigned long long>(sweep.runs),
                static_cast<unsigned long long>(sweep.peak_queue_ratio_num),
                static_cast<unsigned long long>(sweep.peak_queue_ratio_den));
  o.detail = buf;
  return o;
}

Outcome insertion_work() {
  Outcome o;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Relation g = er_graph(seed);
    const Database final_db = testkit::graph_db(g);
    const auto stream = testkit::insertion_stream(g, g.tuples.size(), seed);
    const auto batches = delta::group_by_time(stream);
    for (const auto& name : kQueries) {
      const Query q = named(name);
      gj::Stats delta_stats;
      delta::run_delta_serial(q, {}, batches, &delta_stats);
      std::uint64_t serial = 0;
      for (const auto& dq : delta::derive(q)) {
        serial = std::max(serial, gj::run(dq.query, final_db).stats.probes());
      }
      const double n = static_cast<double>(q.num_relations());
      const double m = static_cast<double>(q.num_attributes);
      const double in = static_cast<double>(input_sizes(q, final_db).total());
      const double bound = 10 * n * static_cast<double>(serial) + 10 * m * n * in;
      const double used = static_cast<double>(delta_stats.probes());
      worst = std::max(worst, bound > 0 ? used / bound : 0.0);
      o.require(used <= bound, name + " seed " + std::to_string(seed) + ": " +
                                   std::to_string(delta_stats.probes()) + " probes > bound " +
                                   std::to_string(bound));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "600 replays, worst probes/bound = %.3f", worst);
  o.detail = buf;
  return o;
}

struct StarRuns {
  bool ran = false;
  std::size_t bprime = 0;
  bigjoin_s::BalancedResult balanced;
  bigjoin::StaticResult plain;
};

StarRuns star;

void run_star() {
  if (star.ran) return;
  const Query q = named("triangle");
  const Database db = testkit::graph_db(testkit::star(10000, true));
  const std::size_t w = 8;
  const double in = static_cast<double>(input_sizes(q, db).total());
  const auto lg = static_cast<std::size_t>(std::ceil(std::log2(in * std::pow(in, 1.5))));
  star.bprime = std::max(w * w, w * lg);
  const WorkerConfig config{w, 0, star.bprime};
  star.balanced = bigjoin_s::run_static_balanced(q, db, config);
  star.plain = bigjoin::run_static(q, db, config);
  star.ran = true;
}

Outcome load_balance() {
  Outcome o;
  run_star();
  const auto& ledger = star.balanced.ledger;
  std::size_t full_rounds = 0;
  for (std::size_t r = 0; r < ledger.rounds(); ++r) full_rounds += ledger.full(r);
  const std::uint64_t peak = max_round_cost(ledger, true);
  const double ratio_s = star.balanced.metrics().skew_ratio();
  const double ratio_p = star.plain.metrics().skew_ratio();
  o.require(star.balanced.tuples == star.plain.tuples, "engines disagree on the star graph");
  o.require(full_rounds >= 50, "only " + std::to_string(full_rounds) + " full rounds");
  o.require(peak <= 4 * star.bprime,
            "full-round load " + std::to_string(peak) + " > 4B' = " + std::to_string(4 * star.bprime));
  o.require(ratio_s <= 0.5 * ratio_p, "skew ratio not halved");
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "B'=%zu full rounds=%zu peak load=%llu (4B'=%zu) skew S=%.3f plain=%.3f",
                star.bprime, full_rounds, static_cast<unsigned long long>(peak),
                4 * star.bprime, ratio_s, ratio_p);
  o.detail = buf;
  return o;
}

Outcome inventory() {
  Outcome o;
  run_star();
  const std::uint64_t batch = 8 * star.bprime;
  o.require(star.balanced.stats.max_level_quads <= 4 * batch,
            "star: " + std::to_string(star.balanced.stats.max_level_quads) + " quads > 4B");
  o.require(sweep.ran, "static sweep did not run");
  o.require(sweep.inventory_violations == 0,
            std::to_string(sweep.inventory_violations) + " sweep runs exceeded 4B quads");
  o.detail = "star peak " + std::to_string(star.balanced.stats.max_level_quads) + " quads (4B=" +
             std::to_string(4 * batch) + "), " + std::to_string(sweep.runs) + " sweep runs";
  return o;
}

struct MviRun {
  std::vector<VersionedQueryResult> before, after, expected;
};

MviRun mvi_run(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SignedUpdate> log;
  for (int k = 0; k < 1000; ++k) {
    const Value key = testkit::uniform_below(rng, 20);
    const Value val = testkit::uniform_below(rng, 10);
    const auto t = static_cast<Timestamp>(k / 10);
    log.push_back({{key, val}, t, testkit::uniform_below(rng, 2) ? 1 : -1});
  }
  std::vector<std::pair<Value, Timestamp>> queries;
  for (int k = 0; k < 100; ++k) {
    queries.emplace_back(testkit::uniform_below(rng, 20), testkit::uniform_below(rng, 110));
  }
  MviRun run;
  MultiVersionIndex idx;
  for (std::size_t k = 0; k < log.size(); k += 100) {
    idx.ingest(std::span<const SignedUpdate>(log).subspan(k, 100));
    idx.advance(log[k].time);
  }
  for (auto [key, t] : queries) {
    std::map<Value, Weight> acc;
    for (const auto& u : log) {
      if (u.tuple[0] == key && u.time <= t) acc[u.tuple[1]] += u.weight;
    }
    VersionedQueryResult r;
    for (auto [v, w] : acc) {
      if (w != 0) r.push_back({v, w});
    }
    run.expected.push_back(std::move(r));
    run.before.push_back(idx.query_at(Tuple{key}, t));
  }
  idx.advance(100);
  idx.compact();
  for (auto [key, t] : queries) run.after.push_back(idx.query_at(Tuple{key}, t));
  return run;
}

Outcome mvi_oracle() {
  Outcome o;
  const auto run = mvi_run(8);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < run.expected.size(); ++k) {
    mismatches += run.before[k] != run.expected[k];
    mismatches += run.after[k] != run.expected[k];
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatching queries");
  o.detail = "1000 updates, 20 keys, 100 queries x 2 phases";
  return o;
}

struct OptCounts {
  std::vector<std::uint64_t> values;
};

OptCounts optimization_counts(Outcome* o) {
  OptCounts out;
  const Query tri = named("triangle");
  const Query k4 = named("4-clique");
  const Query house = with_order(named("house"), front::factor_order(named("house")));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Relation g = testkit::symmetrize(testkit::erdos_renyi(10 + seed % 8, 0.3, 500 + seed));
    const Database db = testkit::graph_db(g);
    const auto sb = front::symmetry_break(g);
    Database sdb = testkit::graph_db(sb.graph);
    sdb["tri"] = front::build_triangle_relation(sb.graph);
    const std::string tag = " seed " + std::to_string(seed);

    const auto tri_directed = testkit::oracle_join(tri, db).size();
    const auto tri_constrained = gj::run(front::constrain_symmetry(tri), sdb).tuples.size();
    const auto k4_directed = testkit::oracle_join(k4, db).size();
    const Query k4_sym = front::constrain_symmetry(k4);
    const auto k4_constrained = gj::run(k4_sym, sdb).sorted_tuples();
    const auto k4_rewritten = gj::run(front::triangle_rewrite(k4_sym), sdb).sorted_tuples();
    const auto factorized = front::factorized_last_pair(house, db);
    const auto house_oracle = testkit::oracle_join(house, db);
    std::vector<Tuple> flat_oracle;
    for (const auto& t : house_oracle) flat_oracle.push_back(t.tuple);

    if (o) {
      o->require(tri_constrained * 6 == tri_directed, "triangle symmetry" + tag);
      o->require(k4_constrained.size() * 24 == k4_directed, "4-clique symmetry" + tag);
      o->require(k4_rewritten == k4_constrained, "tri rewrite" + tag);
      o->require(factorized.flat_count() == house_oracle.size() &&
                     factorized.flatten(house) == flat_oracle,
                 "factorized house" + tag);
    }
    out.values.insert(out.values.end(), {tri_directed, tri_constrained, k4_directed,
                                         k4_constrained.size(), k4_rewritten.size(),
                                         factorized.flat_count()});
  }
  return out;
}

Outcome optimization_soundness() {
  Outcome o;
  const auto counts = optimization_counts(&o);
  std::uint64_t triangles = 0, cliques = 0, houses = 0;
  for (std::size_t k = 0; k < counts.values.size(); k += 6) {
    triangles += counts.values[k + 1];
    cliques += counts.values[k + 3];
    houses += counts.values[k + 5];
  }
  o.detail = "20 graphs: " + std::to_string(triangles) + " triangles, " + std::to_string(cliques) +
             " 4-cliques, " + std::to_string(houses) + " houses";
  return o;
}

Outcome determinism() {
  Outcome o;
  auto twice = [&](const std::string& what, const std::function<std::string()>& f) {
    o.require(f() == f(), what);
  };
  auto tuples_text = [](const std::vector<WeightedTuple>& ts) {
    std::ostringstream os;
    for (const auto& t : ts) {
      for (Value v : t.tuple) os << v << ' ';
      os << t.weight << '\n';
    }
    return os.str();
  };
  twice("sample graph trace", [&] {
    const auto r = gj::run(named("triangle"), testkit::graph_db(testkit::sample_graph()), {true});
    return tuples_text(r.tuples) + std::to_string(r.stats.probes());
  });
  for (std::uint64_t seed : {3, 77, 151}) {
    const Database db = testkit::graph_db(er_graph(seed));
    for (const auto& name : kQueries) {
      twice("static " + name, [&] {
        const auto r = bigjoin::run_static(named(name), db, {4, seed, 3});
        return r.metrics().to_json() + tuples_text(r.tuples);
      });
      twice("static-balanced " + name, [&] {
        const auto r = bigjoin_s::run_static_balanced(named(name), db, {4, seed, 3});
        return r.metrics().to_json() + tuples_text(r.tuples);
      });
    }
  }
  twice("delta stream", [&] {
    const Relation base = er_graph(9);
    delta::DeltaBigJoin engine(named("diamond"), {4, 9, 4});
    engine.load(testkit::graph_db(base));
    std::string out;
    for (const auto& b :
         delta::group_by_time(testkit::random_update_stream(base, 17, 10, 8, 1009))) {
      out += tuples_text(as_weighted(engine.apply(b.updates, b.time)));
    }
    return engine.metrics().to_json() + out;
  });
  twice("insertion replay", [&] {
    gj::Stats s;
    const Relation g = er_graph(11);
    delta::run_delta_serial(named("4-clique"), {}, delta::group_by_time(testkit::insertion_stream(g, g.tuples.size(), 11)), &s);
    return std::to_string(s.probes());
  });
  run_star();
  {
    const Query q = named("triangle");
    const Database db = testkit::graph_db(testkit::star(10000, true));
    const WorkerConfig config{8, 0, star.bprime};
    o.require(bigjoin_s::run_static_balanced(q, db, config).metrics().to_json() ==
                  star.balanced.metrics().to_json(),
              "star balanced metrics");
    o.require(bigjoin::run_static(q, db, config).metrics().to_json() ==
                  star.plain.metrics().to_json(),
              "star plain metrics");
  }
  twice("multi-version index", [&] {
    const auto r = mvi_run(8);
    std::ostringstream os;
    for (const auto& q : r.after) {
      for (const auto& e : q) os << e.value << ':' << e.weight << ' ';
      os << '\n';
    }
    return os.str();
  });
  twice("optimizations", [&] {
    std::string s;
    for (auto v : optimization_counts(nullptr).values) s += std::to_string(v) + ' ';
    return s;
  });
  o.detail = "reran criteria 1-9 workloads";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "golden trace on sample graph", 1, sample_graph},
      {2, "static oracle equivalence", 300, oracle_static},
      {3, "delta correctness", 300, delta_correctness},
      {4, "batching memory bound", 0, batching_memory},
      {5, "insertion-only work bound", 0, insertion_work},
      {6, "balanced load on the star graph", 120, load_balance},
      {7, "balanced inventory bound", 0, inventory},
      {8, "multi-version index oracle", 10, mvi_oracle},
      {9, "optimization soundness", 0, optimization_soundness},
      {10, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "took %.2fs, limit %.0fs", secs, c.limit_seconds);
      o.require(false, buf);
    }
    std::printf("%s %2d %-34s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    for (const auto& f : o.failures) std::printf("       - %s\n", f.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
