#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "fluxq/error.hpp"
#include "fluxq/xquery.hpp"
#include "generators.hpp"

namespace fluxq {
namespace {

using K = XQuery::Kind;

TEST(QueryParse, XmpQ3Structure) {
  XPtr q = parse_xquery(fixtures::kXmpQ3);
  XPtr expected = XQuery::seq(
      {XQuery::str("<results>"),
       XQuery::for_("$b", kRootVar, {"bib", "book"},
                    XQuery::seq({XQuery::str("<result>"), XQuery::path_out("$b", {"title"}),
                                 XQuery::path_out("$b", {"author"}), XQuery::str("</result>")})),
       XQuery::str("</results>")});
  EXPECT_TRUE(equal(*q, *expected)) << to_string(*q);
}

TEST(QueryParse, PureString) {
  XPtr q = parse_xquery("<hello/>");
  ASSERT_EQ(q->kind, K::Str);
  EXPECT_EQ(q->text, "<hello/>");
}

TEST(QueryParse, ForWhere) {
  XPtr q = parse_xquery(R"({ for $x in $ROOT/a where $x/b = "v" return {$x} })");
  ASSERT_EQ(q->kind, K::ForWhere);
  ASSERT_EQ(q->cond->kind, Condition::Kind::Compare);
  EXPECT_EQ(q->cond->literal, "v");
  EXPECT_EQ(q->cond->op, RelOp::Eq);
  EXPECT_EQ(q->body->kind, K::VarOut);
}

TEST(QueryParse, LeadingSlashMeansRoot) {
  XPtr q = parse_xquery("{ for $p in /site/people/person return {$p} }");
  ASSERT_EQ(q->kind, K::For);
  EXPECT_EQ(q->source, kRootVar);
  EXPECT_EQ(q->path, (std::vector<std::string>{"site", "people", "person"}));
}

TEST(QueryParse, EmptyIsSugarForNotExists) {
  CondPtr c = parse_condition("empty($x/a)");
  ASSERT_EQ(c->kind, Condition::Kind::Not);
  EXPECT_EQ(c->children[0]->kind, Condition::Kind::Exists);
}

TEST(QueryParse, FlippedLiteralComparison) {
  CondPtr c = parse_condition("1991 < $b/year");
  ASSERT_EQ(c->kind, Condition::Kind::Compare);
  EXPECT_EQ(c->op, RelOp::Gt);
  EXPECT_EQ(c->literal, "1991");
}

TEST(QueryParse, Errors) {
  EXPECT_THROW(parse_xquery("{ for $x in $y/a return {$x} }"), ParseError);
  EXPECT_THROW(parse_xquery("{ for $x in $ROOT//a return {$x} }"), ParseError);
  EXPECT_THROW(parse_xquery("{ count($ROOT/a) }"), ParseError);
  EXPECT_THROW(parse_xquery("{ for $x in $ROOT/a/@id return {$x} }"), ParseError);
  EXPECT_THROW(parse_xquery("{ let $x := $ROOT/a return {$x} }"), ParseError);
  EXPECT_THROW(parse_xquery("{ if exists $ROOT/a then x else y }"), ParseError);
  EXPECT_THROW(parse_xquery("{ for $x in $ROOT/a return {$x}"), ParseError);
  EXPECT_THROW(parse_xquery("a } b"), ParseError);
}

TEST(QueryParse, RebindingIsRenamedApart) {
  XPtr q = parse_xquery(
      "{ for $x in $ROOT/a return {$x} } { for $x in $ROOT/a return {$x} }");
  auto names = binders(*q);
  ASSERT_EQ(names.size(), 2u);
  EXPECT_NE(names[0], names[1]);
  EXPECT_EQ(free_vars(*q), (std::set<std::string>{kRootVar}));
}

TEST(QueryAst, FreeVars) {
  EXPECT_EQ(free_vars(*XQuery::var_out("$x")), (std::set<std::string>{"$x"}));
  EXPECT_EQ(free_vars(*XQuery::for_("$x", "$y", {"a"}, XQuery::var_out("$x"))),
            (std::set<std::string>{"$y"}));
  XPtr e = XQuery::if_(Condition::join({"$a", {"p"}}, RelOp::Eq, {"$b", {"q"}}), XQuery::str("s"));
  EXPECT_EQ(free_vars(*e), (std::set<std::string>{"$a", "$b"}));
}

TEST(QueryAst, ParentVar) {
  XPtr inner = XQuery::var_out("$y");
  XPtr mid = XQuery::for_("$y", "$x", {"b"}, inner);
  XPtr body = XQuery::seq({XQuery::str("s"), mid});
  XPtr q = XQuery::for_("$x", kRootVar, {"a"}, body);
  EXPECT_EQ(parent_var(body, q), "$x");
  EXPECT_EQ(parent_var(inner, q), "$y");
  XPtr top = XQuery::str("t");
  EXPECT_EQ(parent_var(top, top), kRootVar);
  EXPECT_FALSE(parent_var(XQuery::str("u"), q).has_value());
}

TEST(QueryAst, Dependencies) {
  XPtr handler_body = parse_xquery("{ for $book in $ROOT/bib return { for $a in $book/author return {$a} } }");
  // Body of the on-first handler of the first FluX listing.
  XPtr loop = handler_body->body;
  EXPECT_EQ(dependencies("$book", *loop), (std::set<std::string>{"author"}));

  XPtr q1n = parse_xquery(fixtures::kXmpQ1Normal);
  // the body of `for $b in $bib/book`
  XPtr region = q1n->items[1]->body->body;
  EXPECT_EQ(dependencies("$b", *region), (std::set<std::string>{"year", "title", "publisher"}));
  EXPECT_TRUE(dependencies("$z", *region).empty());
}

TEST(QueryAst, ConditionPaths) {
  XPtr e = parse_xquery(R"({ for $b in $ROOT/bib return { if $b/year > "1991" then x } })");
  EXPECT_EQ(condition_paths(*e), (std::set<VarPath>{{"$b", {"year"}}}));
  EXPECT_TRUE(condition_paths(*XQuery::str("s")).empty());
  XPtr j = parse_xquery(fixtures::kJoinQ3);
  EXPECT_EQ(condition_paths(*j),
            (std::set<VarPath>{{"$article", {"author"}}, {"$book", {"editor"}}}));
}

TEST(QueryAst, SerializeParseRoundTripOnFixtures) {
  for (const char* text : {fixtures::kXmpQ3, fixtures::kXmpQ1, fixtures::kXmpQ1Normal,
                           fixtures::kXmpQ2Normal, fixtures::kJoinQ3}) {
    XPtr q = parse_xquery(text);
    XPtr back = parse_xquery(to_string(*q));
    EXPECT_TRUE(equal(*q, *back)) << to_string(*q);
  }
}

TEST(QueryAst, EscapedLiteralText) {
  XPtr q = XQuery::seq({XQuery::str(" a{b}$c\\d "), XQuery::str("e;f")});
  XPtr back = parse_xquery(to_string(*q));
  EXPECT_TRUE(equal(*q, *back)) << to_string(*q);
}

TEST(QueryAst, ElseWordInText) {
  XPtr q = XQuery::if_(Condition::truth(), XQuery::str("else"));
  XPtr back = parse_xquery(to_string(*q));
  EXPECT_TRUE(equal(*q, *back)) << to_string(*q);
  EXPECT_NO_THROW(parse_xquery("{ if true() then elsewhere }"));
}

TEST(QueryProperties, RoundTripAndUniqueness) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    Dtd dtd = parse_dtd(testing::random_dtd(rng));
    XPtr q = testing::random_query(rng, dtd);
    std::string text = to_string(*q);
    XPtr back = parse_xquery(text);
    ASSERT_TRUE(equal(*q, *back)) << text << "\n" << to_string(*back);
    for (const auto& v : free_vars(*back)) EXPECT_EQ(v, kRootVar);
    auto b = binders(*back);
    EXPECT_EQ(std::set<std::string>(b.begin(), b.end()).size(), b.size());
  }
}

TEST(QueryProperties, DependenciesAreChildSymbols) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    Dtd dtd = parse_dtd(testing::random_dtd(rng));
    XPtr q = testing::random_query(rng, dtd);
    for (const auto& d : dependencies(kRootVar, *q)) EXPECT_EQ(d, dtd.root);
  }
}

}  // namespace
}  // namespace fluxq
