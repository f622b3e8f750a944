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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wcoj/bigjoin.hpp"
#include "wcoj/bigjoin_s.hpp"
#include "wcoj/delta.hpp"
#include "wcoj/front.hpp"
#include "wcoj/gj.hpp"
#include "wcoj/testkit.hpp"

namespace py = pybind11;
using namespace wcoj;

namespace {

using Edges = std::vector<std::pair<Value, Value>>;

Relation to_relation(const Edges& edges) {
  Relation r;
  for (auto [u, v] : edges) r.tuples.push_back({u, v});
  return r;
}

py::tuple run(const std::string& engine, const std::string& query, const Edges& edges,
              std::size_t workers, std::size_t batch, std::uint64_t seed) {
  const Query q = front::parse_query(query);
  const Database db = testkit::graph_db(to_relation(edges));
  WorkerConfig config{workers, seed, batch};
  std::vector<WeightedTuple> tuples;
  Metrics metrics = report(CostLedger(1));
  if (engine == "serial") {
    tuples = gj::run(q, db).tuples;
    std::sort(tuples.begin(), tuples.end());
  } else if (engine == "oracle") {
    tuples = testkit::oracle_join(q, db);
  } else if (engine == "static") {
    auto r = bigjoin::run_static(q, db, config);
    tuples = std::move(r.tuples);
    metrics = r.metrics();
  } else if (engine == "static-balanced") {
    auto r = bigjoin_s::run_static_balanced(q, db, config);
    tuples = std::move(r.tuples);
    metrics = r.metrics();
  } else {
    throw py::value_error("unknown engine " + engine);
  }
  py::list out;
  for (const auto& t : tuples) out.append(py::make_tuple(py::cast(t.tuple), t.weight));
  return py::make_tuple(out, metrics.to_json());
}

py::tuple run_delta(const std::string& query, const Edges& base,
                    const std::vector<std::tuple<int, Value, Value, Timestamp>>& updates,
                    std::size_t workers, std::size_t batch, std::uint64_t seed) {
  std::vector<SignedUpdate> stream;
  for (auto [sign, u, v, t] : updates) stream.push_back({{u, v}, t, sign < 0 ? -1 : 1});
  delta::DeltaBigJoin engine(front::parse_query(query), WorkerConfig{workers, seed, batch});
  engine.load(testkit::graph_db(to_relation(base)));
  py::list out;
  for (const auto& b : delta::group_by_time(stream)) {
    for (const auto& d : engine.apply(b.updates, b.time)) {
      out.append(py::make_tuple(py::cast(d.tuple), d.weight, d.time));
    }
  }
  return py::make_tuple(out, engine.metrics().to_json());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Worst-case optimal subgraph queries";

  py::register_exception<Error>(m, "WcojError", PyExc_RuntimeError);

  m.def("standard_query", [](const std::string& name) { return front::standard_query(name); });
  m.def("run", &run, py::arg("engine"), py::arg("query"), py::arg("edges"),
        py::arg("workers") = 1, py::arg("batch") = 64, py::arg("seed") = 0);
  m.def("run_delta", &run_delta, py::arg("query"), py::arg("base"), py::arg("updates"),
        py::arg("workers") = 1, py::arg("batch") = 64, py::arg("seed") = 0);
}
