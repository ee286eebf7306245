#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "fluxq/normalize.hpp"
#include "generators.hpp"

namespace fluxq {
namespace {

TEST(Normalize, XmpQ1Golden) {
  auto r = normalize(parse_xquery(fixtures::kXmpQ1));
  XPtr expected = parse_xquery(fixtures::kXmpQ1Normal);
  EXPECT_TRUE(alpha_equal(r.expr, expected)) << to_string(*r.expr);
  EXPECT_TRUE(is_normal_form(*r.expr));
  EXPECT_TRUE(is_normal_form(*expected));
  auto again = normalize(r.expr);
  EXPECT_TRUE(equal(*again.expr, *r.expr));
  EXPECT_EQ(again.report.rule_applications, 0u);
}

TEST(Normalize, TwoStepPathOutput) {
  auto r = normalize(XQuery::path_out("$y", {"a", "b"}));
  XPtr expected = XQuery::for_("$_g1", "$y", {"a"},
                               XQuery::for_("$_g2", "$_g1", {"b"}, XQuery::var_out("$_g2")));
  EXPECT_TRUE(equal(*r.expr, *expected)) << to_string(*r.expr);
  EXPECT_EQ(r.report.fresh_vars, (std::vector<std::string>{"$_g1", "$_g2"}));
}

TEST(Normalize, IfOverSequence) {
  CondPtr chi = parse_condition("exists $x/a");
  auto r = normalize(XQuery::if_(chi, XQuery::seq({XQuery::str("s1"), XQuery::str("s2")})));
  XPtr expected = XQuery::seq({XQuery::if_(chi, XQuery::str("s1")), XQuery::if_(chi, XQuery::str("s2"))});
  EXPECT_TRUE(equal(*r.expr, *expected)) << to_string(*r.expr);
  EXPECT_EQ(r.report.per_rule[4], 1u);
}

TEST(Normalize, NestedIfsConjoin) {
  auto r = normalize(parse_xquery(
      "{ for $x in $ROOT/a return { if exists $x/b then { if exists $x/c then {$x} } } }"));
  ASSERT_EQ(r.expr->kind, XQuery::Kind::For);
  ASSERT_EQ(r.expr->body->kind, XQuery::Kind::If);
  EXPECT_EQ(r.expr->body->cond->kind, Condition::Kind::And);
}

TEST(Normalize, FreshNamesAvoidExistingOnes) {
  auto r = normalize(parse_xquery("{ for $_g1 in $ROOT/a return {$_g1/b} }"));
  ASSERT_EQ(r.report.fresh_vars.size(), 1u);
  EXPECT_EQ(r.report.fresh_vars[0], "$_g2");
}

TEST(NormalForm, Recognizer) {
  EXPECT_TRUE(is_normal_form(*parse_xquery(fixtures::kXmpQ1Normal)));
  EXPECT_FALSE(is_normal_form(*parse_xquery(fixtures::kXmpQ1)));
  CondPtr t = Condition::truth();
  EXPECT_FALSE(is_normal_form(*XQuery::if_(t, XQuery::for_("$x", kRootVar, {"a"}, XQuery::var_out("$x")))));
  EXPECT_FALSE(is_normal_form(*XQuery::for_where("$x", kRootVar, {"a"}, t, XQuery::var_out("$x"))));
  EXPECT_FALSE(is_normal_form(*XQuery::path_out("$x", {"a"})));
}

TEST(NormalizeProperties, NormalFormIdempotenceConfluence) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 400; ++i) {
    Dtd dtd = parse_dtd(testing::random_dtd(rng));
    XPtr q = testing::random_query(rng, dtd);
    auto outer = normalize(q, NormalizeStrategy::OutermostFirst);
    auto inner = normalize(q, NormalizeStrategy::InnermostFirst);
    ASSERT_TRUE(is_normal_form(*outer.expr)) << to_string(*q);
    ASSERT_TRUE(is_normal_form(*inner.expr)) << to_string(*q);
    EXPECT_TRUE(alpha_equal(outer.expr, inner.expr))
        << to_string(*q) << "\n" << to_string(*outer.expr) << "\n" << to_string(*inner.expr);
    EXPECT_TRUE(equal(*normalize(outer.expr).expr, *outer.expr));
  }
}

// n copies of {$y/a/b}: the rule count must grow by the same amount per copy.
TEST(NormalizeProperties, LinearRuleCount) {
  auto count = [](int n) {
    std::vector<XPtr> items;
    for (int i = 0; i < n; ++i) items.push_back(XQuery::path_out(kRootVar, {"a", "b"}));
    return normalize(XQuery::seq(items)).report.rule_applications;
  };
  std::size_t c1 = count(1);
  for (int n : {2, 8, 64, 512}) EXPECT_EQ(count(n), c1 * n);
}

TEST(NormalizeProperties, RuleCountBoundedBySize) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 300; ++i) {
    Dtd dtd = parse_dtd(testing::random_dtd(rng));
    XPtr q = testing::random_query(rng, dtd);
    auto r = normalize(q);
    EXPECT_LE(r.report.rule_applications, 8 * size(*q)) << to_string(*q);
  }
}

}  // namespace
}  // namespace fluxq
