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

#pragma once

#include <string>
#include <vector>

#include "wcoj/common.hpp"

namespace wcoj {

struct WorkerConfig {
  /// w
  std::size_t workers = 1;
  std::uint64_t hash_seed = 0;
  /// B'
  std::size_t batch_per_worker = 1;

  /// B = w * B'
  std::size_t batch() const { return workers * batch_per_worker; }
  /// Throws std::invalid_argument unless w >= 1 and B' >= 1.
  void validate() const;
};

template <class T>
struct Envelope {
  WorkerId destination = 0;
  T payload;
};

/// Per-round, per-worker tallies of one run in the MPC model with memory:
/// rounds r, load L (messages received by a worker in a round), total
/// communication C, and peak cluster memory M = max_t sum_k LocM(t, k), where
/// LocM is a worker's indexed input plus its load plus its stored prefixes.
class CostLedger {
 public:
  explicit CostLedger(std::size_t workers = 1);

  std::size_t workers() const { return workers_; }
  /// Closed rounds.
  std::size_t rounds() const { return received_.size() / workers_; }

  std::uint64_t received(std::size_t round, WorkerId w) const {
    return received_[round * workers_ + w];
  }
  std::uint64_t work(std::size_t round, WorkerId w) const { return work_[round * workers_ + w]; }
  std::uint64_t stored(std::size_t round, WorkerId w) const {
    return stored_[round * workers_ + w];
  }
  std::uint64_t local_memory(std::size_t round, WorkerId w) const {
    return indexed_[w] + received(round, w) + stored(round, w);
  }
  /// True when the round belongs to a batch in which every worker had a full B' of work.
  bool full(std::size_t round) const { return full_[round] != 0; }
  std::uint64_t indexed(WorkerId w) const { return indexed_[w]; }

  std::uint64_t total_communication() const;
  std::uint64_t max_load() const;
  std::uint64_t memory_max() const;
  std::uint64_t total_work() const;

 private:
  friend class Runtime;

  std::size_t workers_;
  std::vector<std::uint64_t> indexed_;
  std::vector<std::uint64_t> received_;
  std::vector<std::uint64_t> work_;
  std::vector<std::uint64_t> stored_;
  std::vector<char> full_;
};

/// Logical workers exchanging messages in barrier-separated rounds. Workers
/// run one after another on the calling thread; inbox order is sender order,
/// so identical inputs and config give identical ledgers.
class Runtime {
 public:
  explicit Runtime(WorkerConfig config);

  const WorkerConfig& config() const { return config_; }
  std::size_t workers() const { return config_.workers; }
  WorkerId owner(KeyView key) const {
    return static_cast<WorkerId>(hash_values(key, config_.hash_seed) % config_.workers);
  }

  /// Delivers envelopes into per-worker inboxes and charges each delivery to
  /// the receiver's load in the open round.
  template <class T>
  std::vector<std::vector<T>> exchange(std::vector<Envelope<T>> envelopes) {
    std::vector<std::vector<T>> inboxes(config_.workers);
    for (auto& env : envelopes) {
      ++open_received_[env.destination];
      inboxes[env.destination].push_back(std::move(env.payload));
    }
    return inboxes;
  }

  void record_work(WorkerId w, std::uint64_t probes) { open_work_[w] += probes; }
  /// Items (prefixes, candidates) a worker holds at the end of the open round.
  void record_stored(WorkerId w, std::uint64_t items) { open_stored_[w] = items; }
  void set_indexed(std::vector<std::uint64_t> per_worker);
  void set_full(bool full) { open_full_ = full; }

  /// Closes the open round.
  void barrier();

  std::size_t round() const { return ledger_.rounds(); }
  const CostLedger& ledger() const { return ledger_; }

 private:
  WorkerConfig config_;
  CostLedger ledger_;
  std::vector<std::uint64_t> open_received_;
  std::vector<std::uint64_t> open_work_;
  std::vector<std::uint64_t> open_stored_;
  bool open_full_ = false;
};

struct WorkerMetrics {
  WorkerId worker = 0;
  std::uint64_t comm = 0;
  std::uint64_t work = 0;
  std::uint64_t max_load = 0;
  std::uint64_t max_round_cost = 0;
  std::uint64_t indexed = 0;
};

struct Metrics {
  std::uint64_t rounds = 0;
  std::uint64_t total_comm = 0;
  std::uint64_t max_load = 0;
  std::uint64_t memory_max = 0;
  std::vector<WorkerMetrics> per_worker;

  /// max / mean of per-worker cumulative (comm + work); 1 for an empty run.
  double skew_ratio() const;
  /// {rounds, total_comm, max_load, memory_max, per_worker: [...]}
  std::string to_json(int indent = 2) const;
};

Metrics report(const CostLedger& ledger);

/// Largest per-worker (received + work) over rounds; `full_only` restricts to
/// rounds of full batches.
std::uint64_t max_round_cost(const CostLedger& ledger, bool full_only);

}  // namespace wcoj
