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

#include <random>
#include <vector>

#include "wcoj/relcore.hpp"

namespace wcoj::testkit {

struct OracleLimits {
  std::size_t max_tuples = 5000;
  std::uint64_t max_steps = 200'000'000;
};

/// Nested-loop natural join with filters, evaluated atom by atom in body
/// order over deduplicated stored relations. Output in attribute-id order,
/// sorted, weight 1 each. Throws ScaleGuard beyond `limits`.
std::vector<WeightedTuple> oracle_join(const Query& q, const Database& db,
                                       const OracleLimits& limits = {});

/// join(after) - join(before), consolidated.
std::vector<WeightedTuple> oracle_diff(const Query& q, const Database& before,
                                       const Database& after, const OracleLimits& limits = {});

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double unit_uniform(std::mt19937_64& rng);
/// Uniform integer in [0, n) by rejection; identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

/// Directed G(nv, p) on vertices 0..nv-1 without self-loops.
Relation erdos_renyi(std::size_t nv, double p, std::uint64_t seed);
/// Hub 0 with edges to spokes 1..hub_degree, plus spoke-to-hub edges if asked.
Relation star(std::size_t hub_degree, bool back_edges);
/// 0 -> 1 -> ... -> k-1 -> 0.
Relation cycle(std::size_t k);
/// The eleven-edge graph whose extension sets match the worked GJ example.
Relation sample_graph();
/// Adds every reverse edge; sorted and deduplicated.
Relation symmetrize(const Relation& g);

Database graph_db(const Relation& edges);

/// Set semantics: inserts add, deletes remove.
Relation apply_updates(const Relation& g, const std::vector<SignedUpdate>& updates);

/// Well-formed mixed stream on vertices 0..nv-1: each batch toggles distinct
/// random pairs (insert if absent, delete if present). Batch b has time b.
std::vector<SignedUpdate> random_update_stream(const Relation& base, std::size_t nv,
                                               std::size_t batches, std::size_t per_batch,
                                               std::uint64_t seed);

/// The edges of `g` as insertions, shuffled and split into `batches` batches.
std::vector<SignedUpdate> insertion_stream(const Relation& g, std::size_t batches,
                                           std::uint64_t seed);

}  // namespace wcoj::testkit
