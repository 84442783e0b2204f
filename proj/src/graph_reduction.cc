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

#include "asmline/graph_reduction.h"

#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "asmline/error.h"

namespace asmline {
namespace {

double PathWeight(const CutsetDigraph& d, const std::vector<int>& edges) {
  double w = 0.0;
  for (int e : edges) w += d.edge(e).weight;
  return w;
}

struct CandidateLess {
  bool operator()(const DigraphPath& a, const DigraphPath& b) const {
    if (a.weight != b.weight) return a.weight < b.weight;
    return a.edges < b.edges;
  }
};

}  // namespace

std::vector<DigraphPath> KShortestPaths(const CutsetDigraph& d, int k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  std::vector<int> next;
  const std::vector<double> dist = DistancesToEnd(d, &next);
  if (d.start() < 0 || d.end() < 0 || !std::isfinite(dist[d.start()])) {
    throw Error(ErrorCode::kPlanningInfeasible, "digraph has no full path");
  }
  auto complete_from = [&](int v, std::vector<int>& edges) {
    while (v != d.end()) {
      edges.push_back(next[v]);
      v = d.edge(next[v]).target;
    }
  };

  std::vector<DigraphPath> found;
  {
    DigraphPath first;
    complete_from(d.start(), first.edges);
    first.weight = PathWeight(d, first.edges);
    found.push_back(std::move(first));
  }
  std::set<std::vector<int>> seen = {found.front().edges};
  std::set<DigraphPath, CandidateLess> candidates;

  while (static_cast<int>(found.size()) < k) {
    const std::vector<int> prev = found.back().edges;
    std::vector<int> root;
    int spur = d.start();
    for (size_t i = 0; i < prev.size(); ++i) {
      // Edges leaving the spur node that earlier paths with this root took.
      std::set<int> banned;
      for (const DigraphPath& p : found) {
        if (p.edges.size() > i &&
            std::equal(root.begin(), root.end(), p.edges.begin())) {
          banned.insert(p.edges[i]);
        }
      }
      // In a DAG the root nodes cannot be revisited, and the distances of
      // all other nodes are unaffected by edges banned at the spur node.
      int best = -1;
      double best_cost = std::numeric_limits<double>::infinity();
      for (int e : d.OutEdges(spur)) {
        if (banned.contains(e)) continue;
        const double cost = d.edge(e).weight + dist[d.edge(e).target];
        if (cost < best_cost) {
          best_cost = cost;
          best = e;
        }
      }
      if (best >= 0 && std::isfinite(best_cost)) {
        DigraphPath cand;
        cand.edges = root;
        cand.edges.push_back(best);
        complete_from(d.edge(best).target, cand.edges);
        if (seen.insert(cand.edges).second) {
          cand.weight = PathWeight(d, cand.edges);
          candidates.insert(std::move(cand));
        }
      }
      root.push_back(prev[i]);
      spur = d.edge(prev[i]).target;
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

void ReductionConfig::Validate() const {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must be in [0, 1)");
  }
  if (k_paths < 1) {
    throw Error(ErrorCode::kInvalidArgument, "k_paths must be >= 1");
  }
  if (protected_outer_layers < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "protected_outer_layers must be >= 0");
  }
}

uint64_t PortableRng::UniformBelow(uint64_t n) {
  // Reject the top partial block so every residue is equally likely.
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

CutsetDigraph ReduceEdges(const CutsetDigraph& d, const ReductionConfig& config,
                          ReductionStats* stats) {
  config.Validate();
  const std::vector<DigraphPath> paths = KShortestPaths(d, config.k_paths);
  std::vector<bool> keep(d.num_edges(), true);
  std::vector<bool> protected_edge(d.num_edges(), false);
  for (const DigraphPath& p : paths) {
    for (int e : p.edges) protected_edge[e] = true;
  }
  std::vector<std::vector<int>> removable(d.num_layers());
  for (int e = 0; e < d.num_edges(); ++e) {
    if (!protected_edge[e]) removable[d.edge(e).layer].push_back(e);
  }

  const int layers = d.num_ops();
  PortableRng rng(config.seed);
  int removed = 0;
  for (int layer = 1; layer <= layers; ++layer) {
    if (layer <= config.protected_outer_layers ||
        layer > layers - config.protected_outer_layers) {
      continue;
    }
    std::vector<int>& pool = removable[layer];
    const auto count = static_cast<size_t>(
        std::floor(config.fraction * static_cast<double>(pool.size())));
    // Partial Fisher-Yates: the first `count` slots become the sample.
    for (size_t i = 0; i < count; ++i) {
      const size_t j = i + rng.UniformBelow(pool.size() - i);
      std::swap(pool[i], pool[j]);
      keep[pool[i]] = false;
    }
    removed += static_cast<int>(count);
  }

  CutsetDigraph reduced = removed == 0 ? d : d.Filtered(keep);
  if (stats != nullptr) {
    stats->edges_before = d.num_edges();
    stats->edges_after = reduced.num_edges();
    stats->removed_by_sampling = removed;
    stats->protected_paths = paths;
  }
  return reduced;
}

}  // namespace asmline
