// Copyright 2026 The sparsedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "sparsedet/hierarchy.h"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.h"
#include "sparsedet/errors.h"

namespace sparsedet {
namespace {

std::set<std::string> Names(const ClassHierarchy& h,
                            const std::vector<ClassId>& ids) {
  std::set<std::string> out;
  for (ClassId c : ids) out.insert(h.Name(c));
  return out;
}

ClassHierarchy Diamond() {
  return ClassHierarchy::Build(
      {"A", "B", "C", "D"}, {{"D", "B"}, {"D", "C"}, {"B", "A"}, {"C", "A"}});
}

ClassHierarchy Chain() {
  return ClassHierarchy::Build({"A", "B", "C"}, {{"B", "A"}, {"C", "B"}});
}

TEST(HierarchyTest, SingleEdge) {
  const auto h = ClassHierarchy::Build({"A", "B"}, {{"B", "A"}});
  EXPECT_EQ(Names(h, h.Ancestors(h.Resolve("B"))), std::set<std::string>{"A"});
  EXPECT_TRUE(h.Ancestors(h.Resolve("A")).empty());
}

TEST(HierarchyTest, TwoCycleRejected) {
  EXPECT_THROW(ClassHierarchy::Build({"A", "B"}, {{"A", "B"}, {"B", "A"}}),
               CycleError);
}

TEST(HierarchyTest, SelfEdgeAndLongCycleRejected) {
  EXPECT_THROW(ClassHierarchy::Build({"A"}, {{"A", "A"}}), CycleError);
  EXPECT_THROW(ClassHierarchy::Build({"A", "B", "C"},
                                     {{"B", "A"}, {"C", "B"}, {"A", "C"}}),
               CycleError);
}

TEST(HierarchyTest, UnknownAndDuplicateClasses) {
  EXPECT_THROW(ClassHierarchy::Build({"A"}, {{"B", "A"}}), UnknownClassError);
  EXPECT_THROW(ClassHierarchy::Build({"A", "A"}, {}), DomainError);
  const auto h = Chain();
  EXPECT_THROW(h.Resolve("Z"), UnknownClassError);
  EXPECT_FALSE(h.Find("Z").has_value());
  EXPECT_THROW(h.Ancestors(MakeClassId(7)), UnknownClassError);
}

TEST(HierarchyTest, DiamondClosure) {
  const auto h = Diamond();
  EXPECT_EQ(Names(h, h.Ancestors(h.Resolve("D"))),
            (std::set<std::string>{"A", "B", "C"}));
  EXPECT_EQ(Names(h, h.Descendants(h.Resolve("A"))),
            (std::set<std::string>{"B", "C", "D"}));
  EXPECT_TRUE(h.IsLeaf(h.Resolve("D")));
  EXPECT_EQ(h.Roots(), std::vector<ClassId>{h.Resolve("A")});
}

TEST(HierarchyTest, ChainQueries) {
  const auto h = Chain();
  EXPECT_EQ(Names(h, h.Ancestors(h.Resolve("C"))),
            (std::set<std::string>{"A", "B"}));
  EXPECT_EQ(Names(h, h.Descendants(h.Resolve("A"))),
            (std::set<std::string>{"B", "C"}));
  EXPECT_TRUE(h.Descendants(h.Resolve("C")).empty());
  EXPECT_TRUE(h.IsAncestor(h.Resolve("A"), h.Resolve("C")));
  EXPECT_FALSE(h.IsAncestor(h.Resolve("C"), h.Resolve("A")));
  EXPECT_FALSE(h.IsAncestor(h.Resolve("A"), h.Resolve("A")));
}

TEST(HierarchyTest, ExpandLabels) {
  const auto h = Chain();
  EXPECT_TRUE(h.ExpandLabels({}).empty());
  const ClassId root[] = {h.Resolve("A")};
  EXPECT_EQ(h.ExpandLabels(root), std::vector<ClassId>{h.Resolve("A")});
  const ClassId leaf[] = {h.Resolve("C")};
  EXPECT_EQ(Names(h, h.ExpandLabels(leaf)),
            (std::set<std::string>{"A", "B", "C"}));
}

TEST(HierarchyTest, DuplicateEdgesCollapse) {
  const auto h = ClassHierarchy::Build({"A", "B"}, {{"B", "A"}, {"B", "A"}});
  EXPECT_EQ(h.edges().size(), 1u);
  EXPECT_EQ(h.Parents(h.Resolve("B")).size(), 1u);
}

TEST(HierarchyTest, ParsesChallengeJson) {
  const auto doc = nlohmann::json::parse(R"({
    "LabelName": "/m/root",
    "Subcategory": [
      {"LabelName": "/m/person",
       "Part": [{"LabelName": "/m/face"}]},
      {"LabelName": "/m/vehicle",
       "Subcategory": [{"LabelName": "/m/car"},
                       {"LabelName": "/m/boat"}]},
      {"LabelName": "/m/toy",
       "Subcategory": [{"LabelName": "/m/car"}]}
    ]})");
  const auto h = ParseHierarchyJson(doc);
  EXPECT_EQ(h.size(), 7u);
  EXPECT_EQ(Names(h, h.Ancestors(h.Resolve("/m/car"))),
            (std::set<std::string>{"/m/root", "/m/vehicle", "/m/toy"}));
  // Parts are classes but not descendants.
  EXPECT_TRUE(h.Ancestors(h.Resolve("/m/face")).empty());
}

TEST(HierarchyTest, JsonRoundTripKeepsEdges) {
  const auto h = Diamond();
  const auto back = ParseHierarchyJson(HierarchyToJson(h));
  ASSERT_EQ(back.size(), h.size());
  for (const auto& name : h.names()) {
    EXPECT_EQ(Names(back, back.Ancestors(back.Resolve(name))),
              Names(h, h.Ancestors(h.Resolve(name))));
  }
}

TEST(HierarchyTest, ParsesCsvEdgeList) {
  std::istringstream in("child,parent\nB,A\nC,B\r\n\nLone\n");
  const auto h = ParseHierarchyCsv(in);
  EXPECT_EQ(h.size(), 4u);
  EXPECT_EQ(Names(h, h.Ancestors(h.Resolve("C"))),
            (std::set<std::string>{"A", "B"}));
  EXPECT_TRUE(h.Ancestors(h.Resolve("Lone")).empty());
}

TEST(HierarchyTest, CsvCycleRejected) {
  std::istringstream in("A,B\nB,A\n");
  EXPECT_THROW(ParseHierarchyCsv(in), CycleError);
}

// Closure matches a plain DFS over parent lists on random DAGs.
TEST(HierarchyPropertyTest, ClosureMatchesDfs) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = oracle::UniformInt(rng, 1, 14);
    const auto [names, edges] = oracle::RandomDag(rng, n);
    const auto h = ClassHierarchy::Build(names, edges);
    const auto dag = oracle::DagFromEdges(names, edges);
    for (int c = 0; c < n; ++c) {
      std::set<int> got, got_desc;
      for (ClassId a : h.Ancestors(MakeClassId(c))) {
        got.insert(static_cast<int>(Index(a)));
      }
      for (ClassId d : h.Descendants(MakeClassId(c))) {
        got_desc.insert(static_cast<int>(Index(d)));
      }
      ASSERT_EQ(got, dag.Ancestors(c));
      ASSERT_EQ(got_desc, dag.Descendants(c));
      // Acyclic: nothing is its own ancestor.
      ASSERT_FALSE(got.contains(c));
    }
    // Expansion is idempotent.
    std::vector<ClassId> labels;
    for (int c = 0; c < n; ++c) {
      if (oracle::Uniform(rng) < 0.3) labels.push_back(MakeClassId(c));
    }
    const auto once = h.ExpandLabels(labels);
    ASSERT_EQ(h.ExpandLabels(once), once);
    ASSERT_TRUE(std::is_sorted(once.begin(), once.end()));
  }
}

TEST(HierarchyPropertyTest, RandomCycleDetected) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = oracle::UniformInt(rng, 2, 10);
    auto [names, edges] = oracle::RandomDag(rng, n);
    // Edges always point to lower indices; close a path back upward.
    const int lo = oracle::UniformInt(rng, 0, n - 2);
    const int hi = oracle::UniformInt(rng, lo + 1, n - 1);
    edges.emplace_back(names[hi], names[lo]);
    edges.emplace_back(names[lo], names[hi]);
    ASSERT_THROW(ClassHierarchy::Build(names, edges), CycleError);
  }
}

}  // namespace
}  // namespace sparsedet
