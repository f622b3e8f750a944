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

#include <sstream>

#include "helpers.hpp"
#include "wcoj/front.hpp"
#include "wcoj/gj.hpp"

namespace wcoj {
namespace {

using test::named;

std::vector<std::vector<AttributeId>> atoms(const Query& q) {
  std::vector<std::vector<AttributeId>> out;
  for (const auto& s : q.schemas) out.push_back(s.attributes);
  return out;
}

TEST(ParseQuery, Triangle) {
  const Query q = front::parse_query("tri(a1,a2,a3) := e(a1,a2), e(a2,a3), e(a3,a1)");
  EXPECT_EQ(q.num_attributes, 3u);
  EXPECT_EQ(atoms(q), (std::vector<std::vector<AttributeId>>{{0, 1}, {1, 2}, {2, 0}}));
  EXPECT_EQ(q.order, (std::vector<AttributeId>{0, 1, 2}));
  EXPECT_EQ(q.attribute_names, (std::vector<std::string>{"a1", "a2", "a3"}));
}

TEST(ParseQuery, StandardQueries) {
  EXPECT_EQ(atoms(named("diamond")),
            (std::vector<std::vector<AttributeId>>{{0, 1}, {1, 2}, {3, 0}, {3, 2}}));
  EXPECT_EQ(named("4-clique").schemas.size(), 6u);
  EXPECT_EQ(named("5-clique").schemas.size(), 10u);
  EXPECT_EQ(named("house").schemas.size(), 8u);
  EXPECT_EQ(named("house").num_attributes, 5u);
  EXPECT_THROW(front::standard_query("pentagon"), UnknownRelation);
}

TEST(ParseQuery, SelfLoop) {
  const Query q = front::parse_query("x(a1) := e(a1,a1)");
  EXPECT_EQ(q.num_attributes, 1u);
  EXPECT_EQ(atoms(q), (std::vector<std::vector<AttributeId>>{{0, 0}}));
}

TEST(ParseQuery, Filters) {
  const Query q = front::parse_query("t(a1,a2,a3) := e(a1,a2), e(a2,a3), e(a1,a3), a1 < a2, a3 > a2");
  EXPECT_EQ(q.filters, (std::vector<Inequality>{{0, 1}, {1, 2}}));
}

TEST(ParseQuery, BodyOnly) {
  const Query q = front::parse_query("e(x,y), e(y,z), e(z,x)");
  EXPECT_EQ(q.num_attributes, 3u);
}

TEST(ParseQuery, Errors) {
  EXPECT_THROW(front::parse_query("bad("), SyntaxError);
  EXPECT_THROW(front::parse_query("q(a1) := e(a1,a2"), SyntaxError);
  EXPECT_THROW(front::parse_query("q(a1) := e(a1 a2)"), SyntaxError);
  EXPECT_THROW(front::parse_query("q(a1,a2) := f(a1,a2)"), UnknownRelation);
  EXPECT_THROW(front::parse_query("q(a1,a2) := e(a1,a2,a1)"), ArityMismatch);
  EXPECT_THROW(front::parse_query("q(a1,a2,a3) := e(a1,a2)"), DanglingAttribute);
  try {
    front::parse_query("q(a1) := e(a1,a1) $");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 18u);
  }
}

TEST(ParseQuery, DefaultOrderStartsWithConnectedPair) {
  const Query q = front::parse_query("p(a1,a2,a3) := e(a1,a3), e(a3,a2)");
  EXPECT_EQ(q.order, (std::vector<AttributeId>{0, 2, 1}));
}

TEST(EdgeList, ParsesWithComments) {
  std::istringstream in("# header\n1 2\n\n  3\t4  \n# tail\n");
  EXPECT_EQ(front::parse_edge_list(in).tuples, (std::vector<Tuple>{{1, 2}, {3, 4}}));
}

TEST(EdgeList, ErrorsCarryLineNumbers) {
  std::istringstream in("1 2\n3 x\n");
  try {
    front::parse_edge_list(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream three("1 2 3\n");
  EXPECT_THROW(front::parse_edge_list(three), ParseError);
  std::istringstream big("18446744073709551615 0\n");
  EXPECT_EQ(front::parse_edge_list(big).tuples[0][0], 18446744073709551615ull);
}

TEST(UpdateStream, Parses) {
  std::istringstream in("+ 1 2 0\n- 1 2 3\n+ 4 5 3\n");
  const auto ups = front::parse_update_stream(in);
  ASSERT_EQ(ups.size(), 3u);
  EXPECT_EQ(ups[1].weight, -1);
  EXPECT_EQ(ups[1].time, 3u);
  EXPECT_EQ(ups[2].tuple, (Tuple{4, 5}));
}

TEST(UpdateStream, Errors) {
  std::istringstream decreasing("+ 1 2 4\n+ 2 3 1\n");
  EXPECT_THROW(front::parse_update_stream(decreasing), ParseError);
  std::istringstream sign("* 1 2 0\n");
  EXPECT_THROW(front::parse_update_stream(sign), ParseError);
}

TEST(SymmetryBreak, EqualDegreeTriangle) {
  const auto sb = front::symmetry_break(testkit::symmetrize(test::edges({{1, 2}, {2, 3}, {3, 1}})));
  EXPECT_EQ(sb.graph.tuples, (std::vector<Tuple>{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(SymmetryBreak, DegreeOrdering) {
  const auto sb = front::symmetry_break(testkit::symmetrize(test::edges({{10, 20}, {10, 30}, {10, 40}})));
  EXPECT_EQ(sb.renumber.at(10), 4u);
  EXPECT_EQ(sb.renumber.at(20), 1u);
  for (const auto& t : sb.graph.tuples) EXPECT_LT(t[0], t[1]);
}

Relation clique(std::size_t k) {
  Relation r;
  for (Value a = 0; a < k; ++a) {
    for (Value b = 0; b < k; ++b) {
      if (a != b) r.tuples.push_back({a, b});
    }
  }
  return r;
}

TEST(SymmetryBreak, FourCliqueOnceInsteadOfTwentyFour) {
  const Query q = named("4-clique");
  const auto sym = clique(4);
  EXPECT_EQ(gj::run(q, testkit::graph_db(sym)).tuples.size(), 24u);
  const auto sb = front::symmetry_break(sym);
  EXPECT_EQ(gj::run(front::constrain_symmetry(q), testkit::graph_db(sb.graph)).tuples.size(), 1u);
}

TEST(SymmetryBreak, TriangleFactorSix) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = testkit::symmetrize(testkit::erdos_renyi(15, 0.3, seed));
    const auto directed = testkit::oracle_join(named("triangle"), testkit::graph_db(g)).size();
    const auto sb = front::symmetry_break(g);
    const auto constrained =
        gj::run(front::constrain_symmetry(named("triangle")), testkit::graph_db(sb.graph));
    EXPECT_EQ(constrained.tuples.size() * 6, directed);
  }
}

TEST(SymmetryBreak, NonCliqueIsRejected) {
  EXPECT_FALSE(front::is_clique_query(named("diamond")));
  EXPECT_TRUE(front::is_clique_query(named("triangle")));
  EXPECT_THROW(front::constrain_symmetry(named("diamond")), Error);
}

TEST(TriangleRelation, KFour) {
  const auto sb = front::symmetry_break(clique(4));
  EXPECT_EQ(front::build_triangle_relation(sb.graph).tuples.size(), 4u);
  EXPECT_EQ(front::build_triangle_relation(sb.graph).arity, 3u);
}

TEST(TriangleRelation, TriangleFree) {
  const auto sb = front::symmetry_break(testkit::symmetrize(testkit::cycle(5)));
  EXPECT_TRUE(front::build_triangle_relation(sb.graph).tuples.empty());
}

TEST(TriangleRelation, RewriteMatchesDirectCliques) {
  for (const std::string name : {"4-clique", "5-clique"}) {
    const Query direct = front::constrain_symmetry(named(name));
    const Query rewritten = front::triangle_rewrite(direct);
    EXPECT_EQ(rewritten.schemas.size(), name == "4-clique" ? 3u : 6u);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto sb = front::symmetry_break(testkit::symmetrize(testkit::erdos_renyi(16, 0.45, seed)));
      Database db = testkit::graph_db(sb.graph);
      db["tri"] = front::build_triangle_relation(sb.graph);
      EXPECT_EQ(gj::run(rewritten, db).sorted_tuples(), gj::run(direct, db).sorted_tuples());
    }
  }
}

TEST(Factorized, HouseOrder) {
  EXPECT_EQ(front::factor_order(named("house")), (std::vector<AttributeId>{1, 2, 3, 0, 4}));
}

TEST(Factorized, HouseFlattensToOracle) {
  const Query q = with_order(named("house"), front::factor_order(named("house")));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto db = testkit::graph_db(testkit::symmetrize(testkit::erdos_renyi(12, 0.35, seed)));
    const auto f = front::factorized_last_pair(q, db);
    const auto oracle = testkit::oracle_join(q, db);
    EXPECT_EQ(f.flat_count(), oracle.size());
    std::vector<Tuple> flat;
    for (const auto& t : oracle) flat.push_back(t.tuple);
    EXPECT_EQ(f.flatten(q), flat);
  }
}

TEST(Factorized, TriangleIsNotFactorizable) {
  EXPECT_THROW(front::check_factorizable(named("triangle")), NotFactorizable);
  EXPECT_THROW(front::factorized_last_pair(named("triangle"), {}), NotFactorizable);
  EXPECT_THROW(front::factor_order(named("4-clique")), NotFactorizable);
}

TEST(Factorized, EmptySideGivesNothing) {
  const Query q = with_order(named("house"), front::factor_order(named("house")));
  const auto db = testkit::graph_db(testkit::symmetrize(test::edges({{1, 2}, {1, 3}, {2, 3}})));
  EXPECT_EQ(front::factorized_last_pair(q, db).flat_count(), 0u);
}

TEST(Factorized, FilterLinkBlocksFactorization) {
  const Query q = front::parse_query("p(a1,a2,a3) := e(a1,a2), e(a1,a3), a2 < a3");
  EXPECT_THROW(front::check_factorizable(q), NotFactorizable);
}

}  // namespace
}  // namespace wcoj
