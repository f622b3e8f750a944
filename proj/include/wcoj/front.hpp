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

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wcoj/relcore.hpp"

namespace wcoj::front {

/// Edge list: one "u v" pair per line; '#' lines and blank lines ignored.
/// Throws ParseError naming the line.
Relation parse_edge_list(std::istream& in);
Relation read_edge_list(const std::string& path);

/// Update stream: lines "<+|-> u v t" with non-decreasing t.
std::vector<SignedUpdate> parse_update_stream(std::istream& in);
std::vector<SignedUpdate> read_update_stream(const std::string& path);

/// Arities of the stored relations a query may name.
using Catalog = std::map<std::string, std::size_t>;
const Catalog& default_catalog();

/// Parses `name(a1,...) := r(...), ..., a1 < a2`. The head is optional.
/// Attributes are numbered by head order, then by first use in the body.
/// Throws SyntaxError, UnknownRelation or ArityMismatch.
Query parse_query(std::string_view text, const Catalog& catalog = default_catalog());

/// Identity order when the first two attributes share a relation; otherwise
/// the first two attributes of the first relation with two, then the rest.
std::vector<AttributeId> default_order(const Query& q);

/// Query texts by name: triangle, triangle-dag, diamond, 4-clique, 5-clique, house.
std::string standard_query(std::string_view name);

struct SymmetryBreak {
  /// Oriented edges, low id to high id, no self-loops.
  Relation graph;
  /// Old id to new id. New ids start at 1 and ascend with (degree, old id).
  std::map<Value, Value> renumber;
};

SymmetryBreak symmetry_break(const Relation& graph);

/// True when every pair of attributes shares a binary atom.
bool is_clique_query(const Query& q);

/// Rewrites a clique query so each atom follows attribute-id order and adds
/// the filters a1 < a2 < ... < am. Over a symmetry-broken graph each clique
/// is then found once instead of m! times. Throws Error for non-clique queries.
Query constrain_symmetry(const Query& q);

/// Triangles (a, b, c) with a < b < c of an oriented graph.
Relation build_triangle_relation(const Relation& oriented);

/// Rewrites a k-clique (k >= 3) over `tri`: atoms tri(a1, ai, aj) for 2 <= i < j.
Query triangle_rewrite(const Query& q);

struct FactorizedRecord {
  /// The first m - 2 attributes in global order.
  Tuple prefix;
  std::vector<Value> first;
  std::vector<Value> second;
};

struct FactorizedResult {
  std::vector<FactorizedRecord> records;
  std::uint64_t flat_count() const;
  /// Flattened tuples in attribute-id order, sorted.
  std::vector<Tuple> flatten(const Query& q) const;
};

/// Throws NotFactorizable when the last two ordered attributes share a
/// relation or a filter.
void check_factorizable(const Query& q);

/// Runs GJ through level m - 2 and extends the last two attributes independently.
FactorizedResult factorized_last_pair(const Query& q, const Database& db);

/// An order ending with the first attribute pair (by id) that shares no
/// relation or filter; the other attributes come first, ascending. For the
/// house query this is (a2, a3, a4, a1, a5). Throws NotFactorizable.
std::vector<AttributeId> factor_order(const Query& q);

}  // namespace wcoj::front
