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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wcoj/common.hpp"

namespace wcoj {

/// One atom of a query body: `source(attributes...)`. An attribute may be
/// repeated (`e(a1,a1)`), which selects source tuples with equal columns.
struct RelationSchema {
  RelationId id = 0;
  std::string source;
  std::vector<AttributeId> attributes;

  /// Attributes in first-occurrence order with repeats removed.
  std::vector<AttributeId> distinct_attributes() const;
  bool contains(AttributeId a) const;
};

/// Filter `lhs < rhs` over attribute values.
struct Inequality {
  AttributeId lhs = 0;
  AttributeId rhs = 0;
  bool operator==(const Inequality&) const = default;
};

struct Query {
  std::vector<RelationSchema> schemas;
  std::size_t num_attributes = 0;
  /// Global attribute order: order[k] is the attribute bound at level k.
  std::vector<AttributeId> order;
  std::vector<Inequality> filters;
  /// Optional display names (a1, a2, ...).
  std::vector<std::string> attribute_names;

  std::size_t num_relations() const { return schemas.size(); }
  std::string attribute_name(AttributeId a) const;
};

/// Returns a copy of `q` evaluated under a different attribute order.
Query with_order(Query q, std::vector<AttributeId> order);

struct SignedUpdate {
  Tuple tuple;
  Timestamp time = 0;
  Weight weight = 1;
};

/// Result tuple (attribute-id order) with its signed multiplicity.
struct WeightedTuple {
  Tuple tuple;
  Weight weight = 1;
  auto operator<=>(const WeightedTuple&) const = default;
};

/// Sums weights of equal tuples, drops zeros, sorts by tuple.
std::vector<WeightedTuple> consolidate(std::vector<WeightedTuple> items);

/// Stored relation. Static evaluation treats it as a set.
struct Relation {
  std::size_t arity = 2;
  std::vector<Tuple> tuples;
};

/// Named stored relations, e.g. "e" (edges) and "tri" (triangles).
using Database = std::map<std::string, Relation>;

struct InputSizes {
  std::vector<std::size_t> per_relation;
  std::size_t total() const;
};

/// |R_i| per query atom (after selection on repeated attributes) and IN.
InputSizes input_sizes(const Query& q, const Database& db);

/// Throws DanglingAttribute or BadOrder.
void validate_query(const Query& q);

/// Attributes of relation `i` among the first `level` ordered attributes,
/// listed in global order. These are the routing key of R_i at that level.
std::vector<AttributeId> binding_attributes(const Query& q, RelationId i, std::size_t level);

/// Relations whose schema contains the attribute bound at `level`.
std::vector<RelationId> relations_binding(const Query& q, std::size_t level);

// ---------------------------------------------------------------------------
// QueryPlan: per-level lookup tables derived once from a validated query.
// ---------------------------------------------------------------------------

/// How relation `relation` constrains the attribute bound at some level.
struct Binding {
  RelationId relation = 0;
  /// Index rank: how many of the relation's attributes are already bound.
  std::size_t rank = 0;
  /// Prefix positions holding the relation's bound attributes, in global order.
  std::vector<std::size_t> key_positions;
  /// True when this level binds the relation's last attribute.
  bool last = false;
};

/// Filter with both operands expressed as prefix positions.
struct PositionFilter {
  std::size_t lhs = 0;
  std::size_t rhs = 0;
};

struct LevelPlan {
  AttributeId attribute = 0;
  /// In relation-id order.
  std::vector<Binding> bindings;
  /// Filters whose later operand is bound at this level.
  std::vector<PositionFilter> filters;
};

class QueryPlan {
 public:
  explicit QueryPlan(Query q);

  const Query& query() const { return query_; }
  std::size_t num_levels() const { return levels_.size(); }
  const LevelPlan& level(std::size_t j) const { return levels_.at(j); }
  std::size_t position(AttributeId a) const { return position_.at(a); }

  /// Distinct attributes of relation `i`, sorted by global position.
  const std::vector<AttributeId>& ordered_attributes(RelationId i) const {
    return ordered_attributes_.at(i);
  }

  /// The binding of relation `i` at `level`, if it binds that attribute.
  const Binding* binding(RelationId i, std::size_t level) const;

  /// Checks every filter bound at `level` against a prefix of length > level.
  bool passes_filters(std::size_t level, KeyView prefix) const;
  /// Checks every filter fully bound within the prefix.
  bool passes_all_filters(KeyView prefix) const;

  /// Converts a full prefix (global order) to attribute-id order.
  Tuple to_attribute_order(KeyView prefix) const;
  /// Converts an attribute-ordered tuple into global order.
  Tuple to_global_order(KeyView tuple) const;

 private:
  Query query_;
  std::vector<std::size_t> position_;
  std::vector<LevelPlan> levels_;
  std::vector<std::vector<AttributeId>> ordered_attributes_;
};

/// Extracts the key of `binding` from a prefix.
inline void extract_key(const Binding& binding, KeyView prefix, Tuple& out) {
  out.clear();
  for (std::size_t p : binding.key_positions) out.push_back(prefix[p]);
}

inline Tuple extract_key(const Binding& binding, KeyView prefix) {
  Tuple key;
  extract_key(binding, prefix, key);
  return key;
}

}  // namespace wcoj
