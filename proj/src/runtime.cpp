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

#include "wcoj/runtime.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace wcoj {

void WorkerConfig::validate() const {
  if (workers < 1) throw std::invalid_argument("worker count must be at least 1");
  if (batch_per_worker < 1) throw std::invalid_argument("batch per worker must be at least 1");
}

CostLedger::CostLedger(std::size_t workers) : workers_(workers), indexed_(workers, 0) {}

std::uint64_t CostLedger::total_communication() const {
  return std::accumulate(received_.begin(), received_.end(), std::uint64_t{0});
}

std::uint64_t CostLedger::total_work() const {
  return std::accumulate(work_.begin(), work_.end(), std::uint64_t{0});
}

std::uint64_t CostLedger::max_load() const {
  return received_.empty() ? 0 : *std::max_element(received_.begin(), received_.end());
}

std::uint64_t CostLedger::memory_max() const {
  const std::uint64_t base = std::accumulate(indexed_.begin(), indexed_.end(), std::uint64_t{0});
  std::uint64_t best = rounds() == 0 ? base : 0;
  for (std::size_t r = 0; r < rounds(); ++r) {
    std::uint64_t sum = 0;
    for (WorkerId w = 0; w < workers_; ++w) sum += local_memory(r, w);
    best = std::max(best, sum);
  }
  return best;
}

Runtime::Runtime(WorkerConfig config)
    : config_(config),
      ledger_(config.workers),
      open_received_(config.workers, 0),
      open_work_(config.workers, 0),
      open_stored_(config.workers, 0) {
  config_.validate();
}

void Runtime::set_indexed(std::vector<std::uint64_t> per_worker) {
  per_worker.resize(config_.workers, 0);
  ledger_.indexed_ = std::move(per_worker);
}

void Runtime::barrier() {
  ledger_.received_.insert(ledger_.received_.end(), open_received_.begin(), open_received_.end());
  ledger_.work_.insert(ledger_.work_.end(), open_work_.begin(), open_work_.end());
  ledger_.stored_.insert(ledger_.stored_.end(), open_stored_.begin(), open_stored_.end());
  ledger_.full_.push_back(open_full_ ? 1 : 0);
  std::fill(open_received_.begin(), open_received_.end(), 0);
  std::fill(open_work_.begin(), open_work_.end(), 0);
}

double Metrics::skew_ratio() const {
  if (per_worker.empty()) return 1.0;
  std::uint64_t max = 0;
  long double sum = 0;
  for (const auto& w : per_worker) {
    const std::uint64_t c = w.comm + w.work;
    max = std::max(max, c);
    sum += c;
  }
  if (sum == 0) return 1.0;
  return static_cast<double>(max / (sum / per_worker.size()));
}

std::string Metrics::to_json(int indent) const {
  nlohmann::ordered_json j;
  j["rounds"] = rounds;
  j["total_comm"] = total_comm;
  j["max_load"] = max_load;
  j["memory_max"] = memory_max;
  auto workers = nlohmann::ordered_json::array();
  for (const auto& w : per_worker) {
    nlohmann::ordered_json e;
    e["worker"] = w.worker;
    e["comm"] = w.comm;
    e["work"] = w.work;
    e["max_load"] = w.max_load;
    e["max_round_cost"] = w.max_round_cost;
    e["indexed"] = w.indexed;
    workers.push_back(std::move(e));
  }
  j["per_worker"] = std::move(workers);
  return j.dump(indent);
}

Metrics report(const CostLedger& ledger) {
  Metrics m;
  m.rounds = ledger.rounds();
  m.total_comm = ledger.total_communication();
  m.max_load = ledger.max_load();
  m.memory_max = ledger.memory_max();
  for (WorkerId w = 0; w < ledger.workers(); ++w) {
    WorkerMetrics wm;
    wm.worker = w;
    wm.indexed = ledger.indexed(w);
    for (std::size_t r = 0; r < ledger.rounds(); ++r) {
      wm.comm += ledger.received(r, w);
      wm.work += ledger.work(r, w);
      wm.max_load = std::max(wm.max_load, ledger.received(r, w));
      wm.max_round_cost = std::max(wm.max_round_cost, ledger.received(r, w) + ledger.work(r, w));
    }
    m.per_worker.push_back(wm);
  }
  return m;
}

std::uint64_t max_round_cost(const CostLedger& ledger, bool full_only) {
  std::uint64_t best = 0;
  for (std::size_t r = 0; r < ledger.rounds(); ++r) {
    if (full_only && !ledger.full(r)) continue;
    for (WorkerId w = 0; w < ledger.workers(); ++w) {
      best = std::max(best, ledger.received(r, w) + ledger.work(r, w));
    }
  }
  return best;
}

}  // namespace wcoj
