#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "fluxq/engine.hpp"
#include "fluxq/projection.hpp"
#include "fluxq/rewrite.hpp"

namespace fluxq {
namespace {

using P = BufferPath;

TEST(Projection, CeoExamplePaths) {
  FPtr q = parse_flux(fixtures::kCeoFlux);
  EXPECT_EQ(buffer_paths("$bib", *q),
            (std::set<BufferPath>{P{"$bib", {"book", "publisher", "ceo"}, PathKind::JoinOperand},
                                  P{"$bib", {"book", "publisher"}, PathKind::OutputSubtree}}));
  EXPECT_EQ(buffer_paths("$article", *q),
            (std::set<BufferPath>{P{"$article", {"author"}, PathKind::JoinOperand}}));
  EXPECT_EQ(buffered_vars(*q), (std::set<std::string>{"$bib", "$article"}));
}

TEST(Projection, CeoExampleTrees) {
  auto trees = buffer_trees(*parse_flux(fixtures::kCeoFlux));
  ASSERT_EQ(trees.size(), 2u);
  const BufferTree& bib = trees.at("$bib");
  int book = bib.child(0, "book");
  ASSERT_GE(book, 0);
  EXPECT_FALSE(bib.node(book).marked);
  int publisher = bib.child(book, "publisher");
  ASSERT_GE(publisher, 0);
  EXPECT_TRUE(bib.node(publisher).marked);
  EXPECT_TRUE(bib.node(publisher).children.empty());  // ceo pruned
  EXPECT_EQ(bib.size(), 3u);
  EXPECT_EQ(bib.dump(), "$bib\n  book\n    publisher *\n");
  EXPECT_EQ(trees.at("$article").dump(), "$article\n  author *\n");
}

TEST(Projection, StringsAndStructure) {
  EXPECT_TRUE(buffer_paths("$x", *XQuery::str("<a>")).empty());
  EXPECT_TRUE(buffered_vars(*FluxExpr::make_simple(XQuery::str("<a/>"))).empty());
  BufferTree t = build_buffer_tree("$r", {P{"$r", {"a"}, PathKind::Structural}});
  EXPECT_EQ(t.dump(), "$r\n  a\n");
  EXPECT_FALSE(t.covered(t.child(0, "a")));
}

TEST(Projection, MarkedPrefixDominates) {
  BufferTree t = build_buffer_tree("$r", {P{"$r", {"a", "b", "c"}, PathKind::OutputSubtree},
                                          P{"$r", {"a"}, PathKind::JoinOperand},
                                          P{"$r", {"d"}, PathKind::Structural}});
  EXPECT_EQ(t.dump(), "$r\n  a *\n  d\n");
  EXPECT_EQ(t.find({"a", "b", "c"}), t.child(0, "a"));
  EXPECT_EQ(t.find({"e"}), -1);
}

TEST(Projection, OwnOutputMarksRoot) {
  XPtr e = parse_xquery("{ if exists $x/a then {$x} }", false);
  EXPECT_EQ(buffer_paths("$x", *e), (std::set<BufferPath>{P{"$x", {}, PathKind::OutputSubtree}}));
  BufferTree t = build_buffer_tree("$x", buffer_paths("$x", *e));
  EXPECT_TRUE(t.root().marked);
  EXPECT_FALSE(t.empty());
}

TEST(Projection, StreamedBodyBuffersNothing) {
  Schema s = load_schema(fixtures::kOrderedBibDtd);
  Compilation c = compile(std::string(fixtures::kXmpQ3), s);
  EXPECT_TRUE(buffer_trees(*c.flux).empty());
}

TEST(Projection, WeakPairsBufferTitlesAndAuthors) {
  auto trees = buffer_trees(*parse_flux(fixtures::kF2));
  ASSERT_EQ(trees.count("$b"), 1u);
  EXPECT_EQ(trees.at("$b").dump(), "$b\n  author *\n  title *\n");
}

TEST(Projection, EvaluatorNetworkOfJoin) {
  // buffer_$bib gets book tags and editor subtrees, buffer_$article authors.
  Schema s = load_schema(fixtures::kOrderedJoinDtd);
  ExecutionPlan plan(parse_flux(fixtures::kF3Prime), s);
  EXPECT_EQ(plan.trees().at("$bib").dump(), "$bib\n  book\n    editor *\n");
  EXPECT_EQ(plan.trees().at("$article").dump(), "$article\n  author *\n");
}

TEST(Projection, CeoBufferContents) {
  Schema s = load_schema(fixtures::kCeoDtd);
  ExecutionPlan plan(parse_flux(fixtures::kCeoFlux), s);
  std::string xml =
      "<bib><book><title>B</title><publisher><name>N</name><ceo>C</ceo></publisher></book>"
      "<book><title>D</title><publisher><name>M</name><ceo>X</ceo></publisher></book>"
      "<article><title>A</title><author>C</author><author>Y</author></article></bib>";
  RunStats st;
  run_to_string(plan, xml, &st);
  // per book: its two tags plus the 8 events of the publisher subtree
  EXPECT_EQ(st.find("$bib")->events_hwm, 20u);
  EXPECT_EQ(st.find("$article")->events_hwm, 6u);
}

}  // namespace
}  // namespace fluxq
