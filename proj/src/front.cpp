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

#include "wcoj/front.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include "wcoj/gj.hpp"
#include "wcoj/index.hpp"

namespace wcoj::front {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::uint64_t parse_u64(std::string_view tok, std::size_t line_no) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(tok) + "'");
  }
  return v;
}

bool skip_line(const std::vector<std::string_view>& toks) {
  return toks.empty() || toks.front().front() == '#';
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

}  // namespace

Relation parse_edge_list(std::istream& in) {
  Relation rel;
  rel.arity = 2;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (skip_line(toks)) continue;
    if (toks.size() != 2) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'u v'");
    }
    rel.tuples.push_back({parse_u64(toks[0], line_no), parse_u64(toks[1], line_no)});
  }
  return rel;
}

Relation read_edge_list(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_edge_list(in);
}

std::vector<SignedUpdate> parse_update_stream(std::istream& in) {
  std::vector<SignedUpdate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = split_ws(line);
    if (skip_line(toks)) continue;
    if (toks.size() != 4 || (toks[0] != "+" && toks[0] != "-")) {
      throw ParseError("line " + std::to_string(line_no) + ": expected '<+|-> u v t'");
    }
    SignedUpdate u;
    u.weight = toks[0] == "+" ? 1 : -1;
    u.tuple = {parse_u64(toks[1], line_no), parse_u64(toks[2], line_no)};
    u.time = parse_u64(toks[3], line_no);
    if (!out.empty() && u.time < out.back().time) {
      throw ParseError("line " + std::to_string(line_no) + ": timestamp decreases");
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<SignedUpdate> read_update_stream(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_update_stream(in);
}

const Catalog& default_catalog() {
  static const Catalog catalog{{"e", 2}, {"tri", 3}};
  return catalog;
}

// ---------------------------------------------------------------------------
// Query text
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { Ident, LParen, RParen, Comma, Define, Less, Greater, Dot, End } kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' ||
                              s[i] == '-')) {
        ++i;
      }
      out.push_back({Token::Ident, std::string(s.substr(start, i - start)), start});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      // Names like 4-clique.
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-')) ++i;
      out.push_back({Token::Ident, std::string(s.substr(start, i - start)), start});
    } else if (c == '(') {
      out.push_back({Token::LParen, "(", i++});
    } else if (c == ')') {
      out.push_back({Token::RParen, ")", i++});
    } else if (c == ',') {
      out.push_back({Token::Comma, ",", i++});
    } else if (c == '<') {
      out.push_back({Token::Less, "<", i++});
    } else if (c == '>') {
      out.push_back({Token::Greater, ">", i++});
    } else if (c == '.') {
      out.push_back({Token::Dot, ".", i++});
    } else if (c == ':' && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({Token::Define, ":=", i});
      i += 2;
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Catalog& catalog)
      : toks_(tokenize(text)), catalog_(catalog) {}

  Query parse() {
    bool has_head = false;
    for (const auto& t : toks_) has_head |= t.kind == Token::Define;
    if (has_head) {
      expect(Token::Ident, "query name");
      expect(Token::LParen, "'('");
      if (peek().kind != Token::RParen) {
        for (;;) {
          const Token& a = expect(Token::Ident, "attribute");
          if (attrs_.count(a.text)) throw SyntaxError("repeated head attribute", a.pos);
          attribute(a.text);
          if (peek().kind == Token::Comma) {
            ++i_;
            continue;
          }
          break;
        }
      }
      expect(Token::RParen, "')'");
      expect(Token::Define, "':='");
    }
    for (;;) {
      body_item();
      if (peek().kind == Token::Comma) {
        ++i_;
        continue;
      }
      break;
    }
    if (peek().kind == Token::Dot) ++i_;
    if (peek().kind != Token::End) throw SyntaxError("unexpected '" + peek().text + "'", peek().pos);
    if (q_.schemas.empty()) throw SyntaxError("query has no relation atoms", 0);
    q_.num_attributes = names_.size();
    q_.attribute_names = names_;
    q_.order = default_order(q_);
    validate_query(q_);
    return q_;
  }

 private:
  const Token& peek() const { return toks_[i_]; }

  const Token& expect(Token::Kind kind, const char* what) {
    if (peek().kind != kind) {
      throw SyntaxError(std::string("expected ") + what, peek().pos);
    }
    return toks_[i_++];
  }

  AttributeId attribute(const std::string& name) {
    auto [it, inserted] = attrs_.try_emplace(name, static_cast<AttributeId>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }

  void body_item() {
    const Token& name = expect(Token::Ident, "relation or attribute");
    if (peek().kind == Token::Less || peek().kind == Token::Greater) {
      const bool less = toks_[i_++].kind == Token::Less;
      const Token& rhs = expect(Token::Ident, "attribute");
      const AttributeId a = attribute(name.text);
      const AttributeId b = attribute(rhs.text);
      q_.filters.push_back(less ? Inequality{a, b} : Inequality{b, a});
      return;
    }
    expect(Token::LParen, "'('");
    RelationSchema schema;
    schema.id = static_cast<RelationId>(q_.schemas.size());
    schema.source = name.text;
    for (;;) {
      const Token& a = expect(Token::Ident, "attribute");
      schema.attributes.push_back(attribute(a.text));
      if (peek().kind == Token::Comma) {
        ++i_;
        continue;
      }
      break;
    }
    expect(Token::RParen, "')'");
    auto rel = catalog_.find(name.text);
    if (rel == catalog_.end()) throw UnknownRelation("unknown relation '" + name.text + "'");
    if (schema.attributes.size() != rel->second) {
      throw ArityMismatch("relation " + name.text + " has arity " + std::to_string(rel->second));
    }
    q_.schemas.push_back(std::move(schema));
  }

  std::vector<Token> toks_;
  const Catalog& catalog_;
  std::size_t i_ = 0;
  Query q_;
  std::map<std::string, AttributeId> attrs_;
  std::vector<std::string> names_;
};

bool co_bound(const Query& q, AttributeId a, AttributeId b) {
  for (const auto& s : q.schemas) {
    if (s.contains(a) && s.contains(b)) return true;
  }
  return false;
}

bool filter_linked(const Query& q, AttributeId a, AttributeId b) {
  for (const auto& f : q.filters) {
    if ((f.lhs == a && f.rhs == b) || (f.lhs == b && f.rhs == a)) return true;
  }
  return false;
}

}  // namespace

Query parse_query(std::string_view text, const Catalog& catalog) {
  return Parser(text, catalog).parse();
}

std::vector<AttributeId> default_order(const Query& q) {
  std::vector<AttributeId> order(q.num_attributes);
  for (AttributeId a = 0; a < q.num_attributes; ++a) order[a] = a;
  if (q.num_attributes < 2 || co_bound(q, 0, 1)) return order;
  for (const auto& s : q.schemas) {
    auto d = s.distinct_attributes();
    if (d.size() < 2) continue;
    std::vector<AttributeId> out{d[0], d[1]};
    for (AttributeId a = 0; a < q.num_attributes; ++a) {
      if (a != d[0] && a != d[1]) out.push_back(a);
    }
    return out;
  }
  return order;
}

std::string standard_query(std::string_view name) {
  if (name == "triangle") return "triangle(a1,a2,a3) := e(a1,a2), e(a2,a3), e(a3,a1)";
  if (name == "triangle-dag") return "triangle(a1,a2,a3) := e(a1,a2), e(a1,a3), e(a2,a3)";
  if (name == "diamond") return "diamond(a1,a2,a3,a4) := e(a1,a2), e(a2,a3), e(a4,a1), e(a4,a3)";
  if (name == "4-clique") {
    return "4-clique(a1,a2,a3,a4) := e(a1,a2), e(a1,a3), e(a1,a4), e(a2,a3), e(a2,a4), e(a3,a4)";
  }
  if (name == "5-clique") {
    return "5-clique(a1,a2,a3,a4,a5) := e(a1,a2), e(a1,a3), e(a1,a4), e(a1,a5), e(a2,a3), "
           "e(a2,a4), e(a2,a5), e(a3,a4), e(a3,a5), e(a4,a5)";
  }
  if (name == "house") {
    return "house(a1,a2,a3,a4,a5) := e(a1,a2), e(a1,a3), e(a1,a4), e(a2,a3), e(a2,a4), "
           "e(a3,a4), e(a2,a5), e(a3,a5)";
  }
  throw UnknownRelation("no standard query named '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Optimizations
// ---------------------------------------------------------------------------

SymmetryBreak symmetry_break(const Relation& graph) {
  std::map<Value, std::set<Value>> neighbors;
  for (const auto& t : graph.tuples) {
    neighbors[t[0]];
    neighbors[t[1]];
    if (t[0] == t[1]) continue;
    neighbors[t[0]].insert(t[1]);
    neighbors[t[1]].insert(t[0]);
  }
  std::vector<std::pair<std::size_t, Value>> ranked;
  for (const auto& [v, ns] : neighbors) ranked.emplace_back(ns.size(), v);
  std::sort(ranked.begin(), ranked.end());
  SymmetryBreak out;
  for (std::size_t k = 0; k < ranked.size(); ++k) out.renumber[ranked[k].second] = k + 1;
  std::set<Tuple> edges;
  for (const auto& t : graph.tuples) {
    if (t[0] == t[1]) continue;
    const Value a = out.renumber[t[0]];
    const Value b = out.renumber[t[1]];
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  out.graph.arity = 2;
  out.graph.tuples.assign(edges.begin(), edges.end());
  return out;
}

bool is_clique_query(const Query& q) {
  for (AttributeId a = 0; a < q.num_attributes; ++a) {
    for (AttributeId b = a + 1; b < q.num_attributes; ++b) {
      bool found = false;
      for (const auto& s : q.schemas) {
        found |= s.attributes.size() == 2 && s.contains(a) && s.contains(b);
      }
      if (!found) return false;
    }
  }
  return q.num_attributes >= 2;
}

Query constrain_symmetry(const Query& q) {
  if (!is_clique_query(q)) throw Error("symmetry constraints need a clique query");
  Query out = q;
  for (auto& s : out.schemas) {
    if (s.attributes.size() == 2 && s.attributes[0] > s.attributes[1]) {
      std::swap(s.attributes[0], s.attributes[1]);
    }
  }
  for (AttributeId a = 0; a + 1 < q.num_attributes; ++a) {
    const Inequality f{a, a + 1};
    if (std::find(out.filters.begin(), out.filters.end(), f) == out.filters.end()) {
      out.filters.push_back(f);
    }
  }
  return out;
}

Relation build_triangle_relation(const Relation& oriented) {
  std::map<Value, std::vector<Value>> out_edges;
  std::set<std::pair<Value, Value>> edge_set;
  for (const auto& t : oriented.tuples) {
    if (t[0] >= t[1] || !edge_set.emplace(t[0], t[1]).second) continue;
    out_edges[t[0]].push_back(t[1]);
  }
  Relation tri;
  tri.arity = 3;
  for (auto& [a, ns] : out_edges) {
    std::sort(ns.begin(), ns.end());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = i + 1; j < ns.size(); ++j) {
        if (edge_set.count({ns[i], ns[j]})) tri.tuples.push_back({a, ns[i], ns[j]});
      }
    }
  }
  return tri;
}

Query triangle_rewrite(const Query& q) {
  if (!is_clique_query(q) || q.num_attributes < 3) {
    throw Error("triangle indexing needs a clique query with at least three attributes");
  }
  Query out;
  out.num_attributes = q.num_attributes;
  out.attribute_names = q.attribute_names;
  out.order = q.order;
  out.filters = q.filters;
  for (AttributeId i = 1; i < q.num_attributes; ++i) {
    for (AttributeId j = i + 1; j < q.num_attributes; ++j) {
      RelationSchema s;
      s.id = static_cast<RelationId>(out.schemas.size());
      s.source = "tri";
      s.attributes = {0, i, j};
      out.schemas.push_back(std::move(s));
    }
  }
  validate_query(out);
  return out;
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

std::uint64_t FactorizedResult::flat_count() const {
  std::uint64_t n = 0;
  for (const auto& r : records) n += r.first.size() * r.second.size();
  return n;
}

std::vector<Tuple> FactorizedResult::flatten(const Query& q) const {
  std::vector<Tuple> out;
  const std::size_t m = q.num_attributes;
  for (const auto& r : records) {
    for (Value a : r.first) {
      for (Value b : r.second) {
        Tuple t(m);
        for (std::size_t k = 0; k < r.prefix.size(); ++k) t[q.order[k]] = r.prefix[k];
        t[q.order[m - 2]] = a;
        t[q.order[m - 1]] = b;
        out.push_back(std::move(t));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_factorizable(const Query& q) {
  validate_query(q);
  const std::size_t m = q.num_attributes;
  if (m < 2) throw NotFactorizable("query has fewer than two attributes");
  const AttributeId a = q.order[m - 2];
  const AttributeId b = q.order[m - 1];
  if (co_bound(q, a, b) || filter_linked(q, a, b)) {
    throw NotFactorizable("last two attributes " + q.attribute_name(a) + " and " +
                          q.attribute_name(b) + " constrain each other");
  }
}

std::vector<AttributeId> factor_order(const Query& q) {
  for (AttributeId a = 0; a < q.num_attributes; ++a) {
    for (AttributeId b = a + 1; b < q.num_attributes; ++b) {
      if (co_bound(q, a, b) || filter_linked(q, a, b)) continue;
      std::vector<AttributeId> order;
      for (AttributeId c = 0; c < q.num_attributes; ++c) {
        if (c != a && c != b) order.push_back(c);
      }
      order.push_back(a);
      order.push_back(b);
      return order;
    }
  }
  throw NotFactorizable("every attribute pair constrains each other");
}

FactorizedResult factorized_last_pair(const Query& q, const Database& db) {
  check_factorizable(q);
  const std::size_t m = q.num_attributes;
  QueryPlan plan(q);
  std::vector<AttributeId> swapped = q.order;
  std::swap(swapped[m - 2], swapped[m - 1]);
  QueryPlan other(with_order(q, swapped));
  IndexCatalog catalog(plan, db);
  IndexCatalog other_catalog(other, db);
  const ViewTable views = catalog.views();
  const ViewTable other_views = other_catalog.views();

  PrefixSet level{Prefix{{}, 1}};
  for (std::size_t j = 0; j + 2 < m && !level.empty(); ++j) {
    level = gj::extend_level(plan, views, level);
  }
  FactorizedResult out;
  for (const Prefix& p : level) {
    FactorizedRecord rec;
    rec.prefix = p.values;
    for (const auto& x : gj::extend_level(plan, views, {p})) rec.first.push_back(x.values.back());
    if (rec.first.empty()) continue;
    for (const auto& x : gj::extend_level(other, other_views, {p})) {
      rec.second.push_back(x.values.back());
    }
    if (rec.second.empty()) continue;
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace wcoj::front
