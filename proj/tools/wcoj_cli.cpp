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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wcoj/bigjoin.hpp"
#include "wcoj/bigjoin_s.hpp"
#include "wcoj/delta.hpp"
#include "wcoj/front.hpp"
#include "wcoj/gj.hpp"
#include "wcoj/testkit.hpp"

namespace {

using namespace wcoj;

struct Options {
  std::string graph;
  std::string updates;
  std::string query;
  std::size_t workers = 1;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
  bool count_only = false;
  std::string metrics_out;
  std::vector<std::string> opts;

  bool has(const std::string& o) const {
    return std::find(opts.begin(), opts.end(), o) != opts.end();
  }
};

std::string query_text(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  for (const char* name : {"triangle", "triangle-dag", "diamond", "4-clique", "5-clique", "house"}) {
    if (arg == name) return front::standard_query(arg);
  }
  return arg;
}

void write_metrics(const Options& o, const Metrics& m) {
  if (o.metrics_out.empty()) return;
  std::ofstream out(o.metrics_out);
  if (!out) throw Error("cannot write " + o.metrics_out);
  out << m.to_json() << "\n";
}

void print_tuples(const std::vector<WeightedTuple>& tuples) {
  for (const auto& t : tuples) {
    for (Weight k = 0; k < t.weight; ++k) {
      for (std::size_t i = 0; i < t.tuple.size(); ++i) std::cout << (i ? " " : "") << t.tuple[i];
      std::cout << "\n";
    }
  }
}

std::uint64_t total_weight(const std::vector<WeightedTuple>& tuples) {
  std::uint64_t n = 0;
  for (const auto& t : tuples) n += static_cast<std::uint64_t>(t.weight);
  return n;
}

int run(const std::string& command, const Options& o) {
  for (const auto& opt : o.opts) {
    if (opt != "sym" && opt != "tri" && opt != "factor") throw Error("unknown --opt " + opt);
  }
  Query q = front::parse_query(query_text(o.query));
  Relation graph;
  if (!o.graph.empty()) graph = front::read_edge_list(o.graph);
  else if (command != "delta") throw Error("--graph is required");

  Database db;
  if (o.has("sym") || o.has("tri")) {
    if (command == "delta") throw Error("--opt sym/tri apply to static evaluation only");
    graph = front::symmetry_break(graph).graph;
    db["tri"] = front::build_triangle_relation(graph);
    q = o.has("tri") ? front::triangle_rewrite(q) : front::constrain_symmetry(q);
  }
  db["e"] = graph;

  WorkerConfig config;
  config.workers = o.workers;
  config.batch_per_worker = o.batch;
  config.hash_seed = o.seed;
  config.validate();

  if (o.has("factor")) {
    if (command != "serial") throw Error("--opt factor is supported by the serial engine only");
    q = with_order(q, front::factor_order(q));
    const auto result = front::factorized_last_pair(q, db);
    write_metrics(o, report(CostLedger(1)));
    if (o.count_only) {
      std::cout << result.flat_count() << "\n";
      return 0;
    }
    for (const auto& r : result.records) {
      for (Value v : r.prefix) std::cout << v << " ";
      std::cout << "|";
      for (Value v : r.first) std::cout << " " << v;
      std::cout << " |";
      for (Value v : r.second) std::cout << " " << v;
      std::cout << "\n";
    }
    return 0;
  }

  std::vector<WeightedTuple> tuples;
  if (command == "serial") {
    tuples = gj::run(q, db).tuples;
    std::sort(tuples.begin(), tuples.end());
    write_metrics(o, report(CostLedger(1)));
  } else if (command == "oracle") {
    tuples = testkit::oracle_join(q, db);
    write_metrics(o, report(CostLedger(1)));
  } else if (command == "static") {
    auto r = bigjoin::run_static(q, db, config);
    tuples = std::move(r.tuples);
    write_metrics(o, r.metrics());
  } else if (command == "static-balanced") {
    auto r = bigjoin_s::run_static_balanced(q, db, config);
    tuples = std::move(r.tuples);
    write_metrics(o, r.metrics());
  } else {
    if (o.updates.empty()) throw Error("--updates is required");
    const auto batches = delta::group_by_time(front::read_update_stream(o.updates));
    delta::DeltaBigJoin engine(q, config);
    engine.load(db);
    std::int64_t net = 0;
    for (const auto& b : batches) {
      for (const auto& d : engine.apply(b.updates, b.time)) {
        net += d.weight;
        if (o.count_only) continue;
        const Weight reps = d.weight < 0 ? -d.weight : d.weight;
        for (Weight k = 0; k < reps; ++k) {
          std::cout << (d.weight < 0 ? "-" : "+");
          for (Value v : d.tuple) std::cout << " " << v;
          std::cout << " " << d.time << "\n";
        }
      }
    }
    write_metrics(o, engine.metrics());
    if (o.count_only) std::cout << (net > 0 ? "+" : "") << net << "\n";
    return 0;
  }
  if (o.count_only) {
    std::cout << total_weight(tuples) << "\n";
  } else {
    print_tuples(tuples);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case optimal subgraph query engine"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"static", "BiGJoin over a static graph"},
      {"static-balanced", "BiGJoin-S over a static graph"},
      {"delta", "Delta-BiGJoin over an update stream"},
      {"serial", "serial Generic Join"},
      {"oracle", "brute-force nested-loop join"},
  };
  for (const auto& [name, desc] : commands) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--graph", o.graph, "edge list file");
    sub->add_option("--updates", o.updates, "update stream file");
    sub->add_option("--query", o.query, "query file, query text, or a standard query name")
        ->required();
    sub->add_option("--workers", o.workers, "logical workers")->check(CLI::PositiveNumber);
    sub->add_option("--batch", o.batch, "batch size per worker")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "hash seed");
    sub->add_flag("--count-only", o.count_only, "print only the result count");
    sub->add_option("--metrics-out", o.metrics_out, "write runtime metrics JSON");
    sub->add_option("--opt", o.opts, "sym, tri or factor (repeatable)")->allow_extra_args(false);
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
