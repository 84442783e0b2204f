// Copyright 2026 The asmline Authors.
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

#include "asmline/line_balancer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "asmline/error.h"
#include "asmline/graph_reduction.h"
#include "json.hpp"
#include "test_fixtures.h"

namespace asmline {
namespace {

using ::asmline::testing::Assembly13;
using ::asmline::testing::Assembly8;
using ::asmline::testing::ChainDigraph;
using ::asmline::testing::RandomAssembly;
using ::asmline::testing::RefBalance;
using ::asmline::testing::RefBottleneck;
using ::asmline::testing::Triangle;

CutsetDigraph Generate(const PartGraph& g, const WeightConfig& mu = {}) {
  return GenerateDigraph(g, NormalizeAttributes(g), mu);
}

BalanceProblem Problem(const CutsetDigraph& d, int phases, double lambda,
                       double c = 1.0, double gap = 0.0) {
  BalanceProblem p;
  p.digraph = &d;
  p.phases = phases;
  p.lambda = lambda;
  p.c = c;
  p.gap = gap;
  return p;
}

// Checks every structural property a solution must satisfy.
void CheckSolution(const Solution& s, const BalanceProblem& p) {
  const CutsetDigraph& d = *p.digraph;
  const int L = d.num_ops();
  ASSERT_EQ(static_cast<int>(s.path.size()), L);
  ASSERT_EQ(static_cast<int>(s.layer_phase.size()), L);
  int v = d.start();
  double w = 0.0;
  std::vector<double> loads(p.phases, 0.0);
  std::set<int> ops;
  for (int i = 0; i < L; ++i) {
    const DigraphEdge& e = d.edge(s.path[i]);
    EXPECT_EQ(e.source, v);
    EXPECT_EQ(e.layer, i + 1);
    EXPECT_EQ(s.ops[i], e.op);
    EXPECT_EQ(s.op_phase[e.op], s.layer_phase[i]);
    ops.insert(e.op);
    v = e.target;
    w += e.weight;
    loads[s.layer_phase[i]] += d.op_times()[e.op];
    if (i == 0) {
      EXPECT_EQ(s.layer_phase[i], 0);
    } else {
      const int step = s.layer_phase[i] - s.layer_phase[i - 1];
      EXPECT_TRUE(step == 0 || step == 1);
    }
  }
  EXPECT_EQ(v, d.end());
  EXPECT_EQ(static_cast<int>(ops.size()), L);
  EXPECT_EQ(s.layer_phase.back(), p.phases - 1);
  EXPECT_NEAR(s.engineering_cost, w, 1e-12);
  const double alpha = *std::max_element(loads.begin(), loads.end());
  EXPECT_NEAR(s.alpha, alpha, 1e-9);
  EXPECT_NEAR(s.objective, (1 - p.lambda) * w + p.lambda * p.c * alpha, 1e-9);
  EXPECT_LE(s.bound, s.objective + 1e-12);
  if (s.proven) {
    EXPECT_LE(s.RelativeGap(), p.gap + 1e-9);
  }
}

TEST(SolveBalanceTest, Chain) {
  const CutsetDigraph d = ChainDigraph({4, 6}, {0.1, 0.2});
  const Solution two = SolveBalance(Problem(d, 2, 1.0));
  EXPECT_EQ(two.alpha, 6.0);
  EXPECT_EQ(two.layer_phase, (std::vector<int>{0, 1}));
  EXPECT_EQ(two.phase_loads, (std::vector<double>{4, 6}));
  const Solution one = SolveBalance(Problem(d, 1, 1.0));
  EXPECT_EQ(one.alpha, 10.0);
  EXPECT_EQ(PhaseLoads(one, d.op_times(), 1).loads, (std::vector<double>{10}));
}

TEST(SolveBalanceTest, Triangle) {
  const CutsetDigraph d = Generate(Triangle({3, 5, 8}));
  const BalanceProblem p = Problem(d, 2, 1.0);
  const Solution s = SolveBalance(p);
  EXPECT_EQ(s.alpha, 8.0);
  EXPECT_EQ(s.objective, BruteForceBalance(p).objective);
  EXPECT_TRUE(s.proven);
  CheckSolution(s, p);
  const PhaseLoadSummary loads = PhaseLoads(s, d.op_times(), 2);
  std::vector<double> sorted = loads.loads;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<double>{8, 8}));
  EXPECT_EQ(loads.alpha, 8.0);
}

TEST(SolveBalanceTest, MatchesIndependentEnumeration) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 60; ++trial) {
    const PartGraph g = RandomAssembly(rng, 3 + trial % 4);
    const WeightConfig mu{0.5, 0.25, 0.25};
    const CutsetDigraph d = Generate(g, mu);
    const int P = 1 + trial % 3;
    const double lambda = (trial % 5) * 0.25;
    const double c = EqualContributionFactor(d, P);
    const BalanceProblem p = Problem(d, P, lambda, c);
    const Solution s = SolveBalance(p);
    CheckSolution(s, p);
    const auto ref = RefBalance(g, mu, P, lambda, c);
    EXPECT_NEAR(s.objective, ref.objective, 1e-9) << trial;
    const Solution b = BruteForceBalance(p);
    CheckSolution(b, p);
    EXPECT_EQ(s.objective, b.objective) << trial;
    EXPECT_EQ(s.ops, b.ops) << trial;
    EXPECT_EQ(s.layer_phase, b.layer_phase) << trial;
    EXPECT_LE(s.bound, ref.objective + 1e-9);
  }
}

TEST(SolveBalanceTest, LexicographicTieBreak) {
  // Zero weights and equal times: every order and split ties.
  const CutsetDigraph d = Generate(Triangle({2, 2, 2}), WeightConfig{1, 0, 0});
  const Solution s = SolveBalance(Problem(d, 2, 0.5));
  std::vector<std::string> ids;
  for (int op : s.ops) ids.push_back(d.op_ids()[op]);
  EXPECT_EQ(ids, (std::vector<std::string>{"J1", "J2", "J3"}));
  EXPECT_EQ(s.layer_phase, (std::vector<int>{0, 0, 1}));
}

TEST(SolveBalanceTest, GapContract) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const PartGraph g = RandomAssembly(rng, 4 + trial % 3);
    const CutsetDigraph d = Generate(g);
    const int P = 1 + trial % 3;
    const double c = EqualContributionFactor(d, P);
    const double opt = SolveBalance(Problem(d, P, 0.5, c)).objective;
    const BalanceProblem p = Problem(d, P, 0.5, c, 0.03);
    const Solution s = SolveBalance(p);
    CheckSolution(s, p);
    EXPECT_LE(s.objective, 1.03 * opt + 1e-12);
    EXPECT_LE(s.bound, opt + 1e-12);
  }
}

TEST(SolveBalanceTest, LambdaExtremes) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const PartGraph g = RandomAssembly(rng, 3 + trial % 4);
    const CutsetDigraph d = Generate(g, WeightConfig{0.2, 0.4, 0.4});
    const int P = 1 + trial % 3;
    // lambda = 0: value is the shortest-path weight.
    const Solution zero = SolveBalance(Problem(d, P, 0.0));
    EXPECT_NEAR(zero.objective, KShortestPaths(d, 1)[0].weight, 1e-12);
    EXPECT_NEAR(zero.engineering_cost, zero.objective, 1e-12);
    // lambda = 1: min over all paths of the best contiguous split.
    const Solution one = SolveBalance(Problem(d, P, 1.0));
    double best = 1e300;
    std::vector<int> perm(d.num_ops());
    std::function<void(int, std::vector<double>&)> walk =
        [&](int v, std::vector<double>& times) {
          if (v == d.end()) {
            best = std::min(best, RefBottleneck(times, P));
            return;
          }
          for (int e : d.OutEdges(v)) {
            times.push_back(d.op_times()[d.edge(e).op]);
            walk(d.edge(e).target, times);
            times.pop_back();
          }
        };
    std::vector<double> times;
    walk(d.start(), times);
    // Phase loads may be summed in a different order than the reference.
    EXPECT_NEAR(one.alpha, best, 1e-12 * best);
    const double total =
        std::accumulate(d.op_times().begin(), d.op_times().end(), 0.0);
    const double max_t = *std::max_element(d.op_times().begin(), d.op_times().end());
    EXPECT_GE(one.alpha, std::max(max_t, total / P) - 1e-12);
  }
}

TEST(SolveBalanceTest, OnePhasePerOperation) {
  const CutsetDigraph d = Generate(Assembly8());
  const BalanceProblem p = Problem(d, d.num_ops(), 1.0);
  const Solution b = BruteForceBalance(p);
  EXPECT_EQ(b.alpha, *std::max_element(d.op_times().begin(), d.op_times().end()));
  EXPECT_EQ(SolveBalance(p).alpha, b.alpha);
}

TEST(SolveBalanceTest, LambdaMonotoneAlpha) {
  const CutsetDigraph d = Generate(Assembly8(), WeightConfig{0.4, 0.3, 0.3});
  for (int P = 2; P <= 4; ++P) {
    const double c = EqualContributionFactor(d, P);
    double prev = 1e300;
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Solution s = SolveBalance(Problem(d, P, lambda, c));
      EXPECT_LE(s.alpha, prev) << "P=" << P << " lambda=" << lambda;
      prev = s.alpha;
    }
  }
}

TEST(SolveBalanceTest, TimeLimitReturnsIncumbent) {
  const CutsetDigraph d = Generate(Assembly13());
  BalanceProblem p = Problem(d, 4, 0.5, EqualContributionFactor(d, 4));
  p.time_limit_s = 1e-9;
  const Solution s = SolveBalance(p);
  EXPECT_FALSE(s.proven);
  CheckSolution(s, p);
  EXPECT_LE(s.bound, s.objective);
}

TEST(SolveBalanceTest, Validation) {
  const CutsetDigraph d = Generate(Triangle());
  EXPECT_THROW(SolveBalance(Problem(d, 4, 0.5)), Error);
  EXPECT_THROW(SolveBalance(Problem(d, 0, 0.5)), Error);
  EXPECT_THROW(SolveBalance(Problem(d, 2, 1.5)), Error);
  EXPECT_THROW(SolveBalance(Problem(d, 2, 0.5, 0.0)), Error);
  EXPECT_THROW(SolveBalance(Problem(d, 2, 0.5, 1.0, 1.0)), Error);
  try {
    BruteForceBalance(Problem(Generate(Assembly13()), 2, 0.5));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInstanceTooLarge);
  }
  const CutsetDigraph broken({"J1"}, {1}, {{0, 0}}, {});
  try {
    SolveBalance(Problem(broken, 1, 0.5));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPlanningInfeasible);
  }
}

TEST(EqualContributionTest, Examples) {
  const CutsetDigraph d = ChainDigraph({2, 4, 6}, {0.5, 0.5, 1.0});
  EXPECT_DOUBLE_EQ(EqualContributionFactor(d, 3), 0.5);
  const CutsetDigraph zero = ChainDigraph({2, 4, 6}, {0, 0, 0});
  EXPECT_EQ(EqualContributionFactor(zero, 3), 1.0);
  const CutsetDigraph tri = Generate(Triangle(), WeightConfig{0, 0, 1});
  const double c = EqualContributionFactor(tri, 2);
  EXPECT_GT(c, 0.0);
  EXPECT_NEAR(c, KShortestPaths(tri, 1)[0].weight / (16.0 / 2), 1e-15);
}

TEST(AnalyticsTest, ChangesAndCumulative) {
  Solution s;
  s.ops = {0, 1, 2};
  const std::vector<std::string> tech = {"MAG", "MAG", "MAG2"};
  EXPECT_EQ(CountAttributeChanges(s, tech), 1);
  const std::vector<std::string> same = {"MAG", "MAG", "MAG"};
  EXPECT_EQ(CountAttributeChanges(s, same), 0);
  Solution alt;
  std::vector<std::string> alternating;
  for (int i = 0; i < 13; ++i) {
    alt.ops.push_back(i);
    alternating.push_back(i % 2 ? "MAG2" : "MAG");
  }
  EXPECT_EQ(CountAttributeChanges(alt, alternating), 12);

  const std::vector<double> attr = {1, 2, 3};
  EXPECT_EQ(CumulativeAttribute(s, attr), (std::vector<double>{1, 3, 6}));
  const std::vector<double> zeros = {0, 0, 0};
  EXPECT_EQ(CumulativeAttribute(s, zeros), (std::vector<double>{0, 0, 0}));
  Solution rev;
  rev.ops = {2, 0, 1};
  EXPECT_EQ(CumulativeAttribute(rev, attr).back(), 6.0);
}

TEST(ExportTest, LpModel) {
  const CutsetDigraph d = Generate(Triangle());
  const BalanceProblem p = Problem(d, 2, 0.5, 0.25);
  const std::string lp = ExportLp(p);
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binary", "End"}) {
    EXPECT_NE(lp.find(section), std::string::npos) << section;
  }
  auto count = [&](const std::string& prefix) {
    int n = 0;
    for (size_t pos = lp.find("\n " + prefix); pos != std::string::npos;
         pos = lp.find("\n " + prefix, pos + 1)) {
      ++n;
    }
    return n;
  };
  EXPECT_EQ(count("start:"), 1);
  EXPECT_EQ(count("end:"), 1);
  EXPECT_EQ(count("flow_"), d.num_nodes() - 2);
  EXPECT_EQ(count("layer_"), 3);
  EXPECT_EQ(count("mono_"), 2 * 2);
  EXPECT_EQ(count("op_"), 3);
  EXPECT_EQ(count("link_"), d.num_edges() * 2);
  EXPECT_EQ(count("load_"), 2);
  EXPECT_NE(lp.find("0.125 alpha"), std::string::npos);
}

TEST(ExportTest, SolutionRoundTrip) {
  const PartGraph g = Assembly8();
  const CutsetDigraph d = Generate(g);
  const BalanceProblem p = Problem(d, 3, 0.5, EqualContributionFactor(d, 3));
  const Solution s = SolveBalance(p);
  const std::string doc = SerializeSolution(s, p, &g);
  const auto json = nlohmann::json::parse(doc);
  EXPECT_EQ(json["operations"].size(), 8u);
  EXPECT_EQ(json["operations"][0]["joint_id"], d.op_ids()[s.ops[0]]);
  EXPECT_TRUE(json["operations"][0].contains("technology"));
  EXPECT_EQ(json["phase_loads"].size(), 3u);
  const Solution back = DeserializeSolution(doc, p);
  EXPECT_EQ(back.path, s.path);
  EXPECT_EQ(back.layer_phase, s.layer_phase);
  EXPECT_EQ(back.objective, s.objective);
  EXPECT_THROW(DeserializeSolution("{\"operations\": []}", p), Error);
}

}  // namespace
}  // namespace asmline
