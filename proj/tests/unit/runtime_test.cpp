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


#include <gtest/gtest.h>

#include "json.hpp"
#include <random>

#include "wcoj/runtime.hpp"

namespace wcoj {
namespace {

TEST(Runtime, DistinctDestinations) {
  Runtime rt({4, 0, 1});
  std::vector<Envelope<int>> env;
  for (WorkerId w = 0; w < 4; ++w) env.push_back({w, static_cast<int>(w)});
  const auto inboxes = rt.exchange(std::move(env));
  rt.barrier();
  for (WorkerId w = 0; w < 4; ++w) {
    ASSERT_EQ(inboxes[w].size(), 1u);
    EXPECT_EQ(inboxes[w][0], static_cast<int>(w));
  }
  EXPECT_EQ(rt.ledger().max_load(), 1u);
  EXPECT_EQ(rt.ledger().total_communication(), 4u);
}

TEST(Runtime, SharedKeyLandsOnOneWorker) {
  Runtime rt({4, 9, 1});
  const Tuple key{42};
  std::vector<Envelope<int>> env;
  for (int k = 0; k < 10; ++k) env.push_back({rt.owner(key), k});
  const auto inboxes = rt.exchange(std::move(env));
  rt.barrier();
  EXPECT_EQ(inboxes[rt.owner(key)].size(), 10u);
  EXPECT_EQ(rt.ledger().max_load(), 10u);
}

TEST(Runtime, Conservation) {
  Runtime rt({8, 1, 1});
  std::mt19937_64 rng(5);
  std::vector<Envelope<Value>> env;
  for (int k = 0; k < 1000; ++k) {
    const Tuple key{rng()};
    env.push_back({rt.owner(key), key[0]});
  }
  const auto inboxes = rt.exchange(std::move(env));
  rt.barrier();
  std::size_t total = 0;
  std::uint64_t per_round = 0;
  for (WorkerId w = 0; w < 8; ++w) {
    total += inboxes[w].size();
    per_round += rt.ledger().received(0, w);
  }
  EXPECT_EQ(total, 1000u);
  EXPECT_EQ(per_round, 1000u);
  EXPECT_EQ(rt.ledger().total_communication(), 1000u);
}

TEST(Runtime, EmptyBarrier) {
  Runtime rt({3, 0, 1});
  rt.barrier();
  rt.barrier();
  EXPECT_EQ(rt.round(), 2u);
  EXPECT_EQ(rt.ledger().max_load(), 0u);
  EXPECT_EQ(rt.ledger().total_communication(), 0u);
}

TEST(Runtime, MemoryAccounting) {
  Runtime rt({2, 0, 1});
  rt.set_indexed({5, 7});
  std::vector<Envelope<int>> env{{0, 1}, {0, 2}, {1, 3}};
  rt.exchange(std::move(env));
  rt.record_stored(1, 4);
  rt.barrier();
  EXPECT_EQ(rt.ledger().local_memory(0, 0), 7u);
  EXPECT_EQ(rt.ledger().local_memory(0, 1), 12u);
  EXPECT_EQ(rt.ledger().memory_max(), 19u);
  rt.barrier();
  EXPECT_EQ(rt.ledger().memory_max(), 19u);
}

TEST(Metrics, EmptyReport) {
  const auto m = report(CostLedger(2));
  EXPECT_EQ(m.rounds, 0u);
  EXPECT_EQ(m.total_comm, 0u);
  EXPECT_EQ(m.max_load, 0u);
  EXPECT_EQ(m.memory_max, 0u);
  EXPECT_EQ(m.per_worker.size(), 2u);
  EXPECT_DOUBLE_EQ(m.skew_ratio(), 1.0);
}

TEST(Metrics, JsonSchema) {
  Runtime rt({2, 0, 1});
  rt.set_indexed({1, 2});
  std::vector<Envelope<int>> env{{1, 1}};
  rt.exchange(std::move(env));
  rt.record_work(0, 3);
  rt.barrier();
  const auto j = nlohmann::json::parse(report(rt.ledger()).to_json());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  EXPECT_EQ(keys, (std::vector<std::string>{"max_load", "memory_max", "per_worker", "rounds",
                                            "total_comm"}));
  EXPECT_EQ(j["rounds"], 1);
  EXPECT_EQ(j["total_comm"], 1);
  ASSERT_EQ(j["per_worker"].size(), 2u);
  EXPECT_EQ(j["per_worker"][0]["work"], 3);
  EXPECT_EQ(j["per_worker"][1]["comm"], 1);
  EXPECT_EQ(j["per_worker"][1]["indexed"], 2);
}

TEST(Metrics, SkewRatio) {
  Runtime rt({2, 0, 1});
  std::vector<Envelope<int>> env{{0, 1}, {0, 2}, {0, 3}};
  rt.exchange(std::move(env));
  rt.barrier();
  EXPECT_DOUBLE_EQ(report(rt.ledger()).skew_ratio(), 2.0);
}

TEST(Metrics, MaxRoundCostFiltersFullRounds) {
  Runtime rt({2, 0, 1});
  rt.record_work(0, 10);
  rt.barrier();
  rt.set_full(true);
  rt.record_work(1, 4);
  rt.barrier();
  EXPECT_EQ(max_round_cost(rt.ledger(), false), 10u);
  EXPECT_EQ(max_round_cost(rt.ledger(), true), 4u);
  EXPECT_FALSE(rt.ledger().full(0));
  EXPECT_TRUE(rt.ledger().full(1));
}

TEST(Runtime, Deterministic) {
  auto run = [] {
    Runtime rt({4, 17, 1});
    for (int r = 0; r < 5; ++r) {
      std::vector<Envelope<int>> env;
      for (int k = 0; k < 50; ++k) env.push_back({rt.owner(Tuple{Value(k * r)}), k});
      rt.exchange(std::move(env));
      rt.barrier();
    }
    return report(rt.ledger()).to_json();
  };
  EXPECT_EQ(run(), run());
}

TEST(WorkerConfig, Validation) {
  EXPECT_THROW((WorkerConfig{0, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((WorkerConfig{1, 0, 0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((WorkerConfig{3, 0, 2}.validate()));
  EXPECT_EQ((WorkerConfig{3, 0, 2}.batch()), 6u);
}

}  // namespace
}  // namespace wcoj
