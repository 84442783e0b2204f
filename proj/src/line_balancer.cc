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
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include "asmline/error.h"
#include "json.hpp"

namespace asmline {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Objectives within this of the optimum count as ties.
constexpr double kTieTolerance = 1e-9;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Phase state of a partial sequence: the open phase, its load, and the
// largest load among closed phases.
struct PhaseLabel {
  int phase = 0;
  double cur = 0.0;
  double closed_max = 0.0;
};

bool Dominates(const PhaseLabel& a, const PhaseLabel& b) {
  return a.phase == b.phase && a.cur <= b.cur && a.closed_max <= b.closed_max;
}

// Read-only data shared by the search routines.
class Instance {
 public:
  explicit Instance(const BalanceProblem& p)
      : d(*p.digraph),
        num_ops(d.num_ops()),
        phases(p.phases),
        lambda(p.lambda),
        c(p.c),
        times(d.op_times()) {
    to_end = DistancesToEnd(d, &next_edge);
    const double total = std::accumulate(times.begin(), times.end(), 0.0);
    remaining_time.resize(d.num_nodes());
    max_remaining.resize(d.num_nodes());
    for (int v = 0; v < d.num_nodes(); ++v) {
      double done = 0.0;
      double max_left = 0.0;
      for (int o = 0; o < num_ops; ++o) {
        if ((d.node(v).joints >> o) & 1) {
          done += times[o];
        } else {
          max_left = std::max(max_left, times[o]);
        }
      }
      remaining_time[v] = std::max(0.0, total - done);
      max_remaining[v] = max_left;
    }
    std::vector<int> order(num_ops);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return d.op_ids()[a] != d.op_ids()[b] ? d.op_ids()[a] < d.op_ids()[b]
                                            : a < b;
    });
    rank.resize(num_ops);
    for (int i = 0; i < num_ops; ++i) rank[order[i]] = i;
    sorted_out.resize(d.num_nodes());
    for (int v = 0; v < d.num_nodes(); ++v) {
      auto out = d.OutEdges(v);
      sorted_out[v].assign(out.begin(), out.end());
      std::sort(sorted_out[v].begin(), sorted_out[v].end(), [&](int a, int b) {
        return rank[d.edge(a).op] < rank[d.edge(b).op];
      });
    }
  }

  int Layer(int v) const { return d.node(v).layer; }

  // Labels reachable by appending operation `op` to a sequence ending in
  // `label` at layer `layer`. At most two: keep the phase open, or start
  // the next one.
  int Extend(const PhaseLabel& label, int layer, int op,
             std::array<PhaseLabel, 2>& out) const {
    const double t = times[op];
    const int left_after = num_ops - (layer + 1);
    int n = 0;
    if (layer == 0) {
      if (left_after >= phases - 1) out[n++] = {0, t, 0.0};
      return n;
    }
    if (left_after >= phases - 1 - label.phase) {
      out[n++] = {label.phase, label.cur + t, label.closed_max};
    }
    if (label.phase + 1 < phases && left_after >= phases - 2 - label.phase) {
      out[n++] = {label.phase + 1, t, std::max(label.closed_max, label.cur)};
    }
    return n;
  }

  // Lower bound on any completion of a partial sequence at node v.
  double LowerBound(int v, const PhaseLabel& label, double weight) const {
    if (v == d.end()) {
      if (label.phase != phases - 1) return kInf;
      return ComposeObjective(weight, std::max(label.closed_max, label.cur),
                              lambda, c);
    }
    const int open = phases - label.phase;
    double alpha = std::max({label.closed_max, label.cur, max_remaining[v]});
    alpha = std::max(alpha, (label.cur + remaining_time[v]) / open);
    return ComposeObjective(weight + to_end[v], alpha, lambda, c);
  }

  const CutsetDigraph& d;
  const int num_ops;
  const int phases;
  const double lambda;
  const double c;
  const std::vector<double>& times;
  std::vector<double> to_end;
  std::vector<int> next_edge;
  std::vector<double> remaining_time;
  std::vector<double> max_remaining;
  std::vector<int> rank;
  std::vector<std::vector<int>> sorted_out;
};

// Canonical evaluation of a (path, layer phases) pair; every search routine
// reports through this so equal solutions have bit-identical objectives.
Solution Evaluate(const Instance& in, std::vector<int> path,
                  std::vector<int> layer_phase) {
  Solution s;
  s.path = std::move(path);
  s.layer_phase = std::move(layer_phase);
  s.op_phase.assign(in.num_ops, -1);
  s.phase_loads.assign(in.phases, 0.0);
  for (size_t i = 0; i < s.path.size(); ++i) {
    const DigraphEdge& e = in.d.edge(s.path[i]);
    s.ops.push_back(e.op);
    s.engineering_cost += e.weight;
    const int p = s.layer_phase[i];
    s.op_phase[e.op] = p;
    s.phase_loads[p] += in.times[e.op];
  }
  s.alpha = *std::max_element(s.phase_loads.begin(), s.phase_loads.end());
  s.objective = ComposeObjective(s.engineering_cost, s.alpha, in.lambda, in.c);
  return s;
}

// Lexicographically smallest phase sequence for a fixed operation sequence
// whose objective is at most `target`, or empty.
std::vector<int> SmallestPhaseSequence(const Instance& in,
                                       const std::vector<int>& path,
                                       double target) {
  const int n = static_cast<int>(path.size());
  double weight = 0.0;
  for (int e : path) weight += in.d.edge(e).weight;
  // Node reached after i operations.
  std::vector<int> node(n + 1, in.d.start());
  for (int i = 0; i < n; ++i) node[i + 1] = in.d.edge(path[i]).target;

  std::vector<int> phases_out(n);
  std::vector<std::vector<std::vector<PhaseLabel>>> failed(
      n + 1, std::vector<std::vector<PhaseLabel>>(in.phases));
  std::function<bool(int, const PhaseLabel&)> dfs =
      [&](int i, const PhaseLabel& label) -> bool {
    const int v = node[i];
    // The path is fixed, so feed the bound its exact total weight.
    const double prefix = v == in.d.end() ? weight : weight - in.to_end[v];
    if (in.LowerBound(v, label, prefix) > target) {
      return false;
    }
    if (i == n) return true;
    for (const PhaseLabel& f : failed[i][label.phase]) {
      if (Dominates(f, label)) return false;
    }
    std::array<PhaseLabel, 2> next;
    const int count = in.Extend(label, i, in.d.edge(path[i]).op, next);
    for (int k = 0; k < count; ++k) {
      phases_out[i] = next[k].phase;
      if (dfs(i + 1, next[k])) return true;
    }
    failed[i][label.phase].push_back(label);
    return false;
  };
  if (!dfs(0, PhaseLabel{})) return {};
  return phases_out;
}

// Depth-first search over operation sequences in lexicographic order; each
// search node carries every non-dominated phase label of its prefix.
// Returns the first full path admitting a phase split with objective at
// most `target`.
class LexFirstSearch {
 public:
  LexFirstSearch(const Instance& in, double target, Clock::time_point started,
                 double time_limit)
      : in_(in),
        target_(target),
        started_(started),
        time_limit_(time_limit),
        failed_(in.d.num_nodes()) {}

  // Empty when none exists or the time limit hit.
  std::vector<int> Run() {
    std::vector<PhaseLabel> labels = {PhaseLabel{}};
    path_.clear();
    if (Dfs(in_.d.start(), 0.0, labels)) return path_;
    return {};
  }

  bool timed_out() const { return timed_out_; }

 private:
  struct Failed {
    double weight;
    std::vector<PhaseLabel> labels;
  };

  bool Covered(int v, double weight, const std::vector<PhaseLabel>& labels) {
    for (const Failed& f : failed_[v]) {
      if (f.weight > weight) continue;
      bool all = true;
      for (const PhaseLabel& l : labels) {
        bool hit = false;
        for (const PhaseLabel& g : f.labels) {
          if (Dominates(g, l)) {
            hit = true;
            break;
          }
        }
        if (!hit) {
          all = false;
          break;
        }
      }
      if (all) return true;
    }
    return false;
  }

  bool Dfs(int v, double weight, const std::vector<PhaseLabel>& labels) {
    if (v == in_.d.end()) {
      for (const PhaseLabel& l : labels) {
        if (in_.LowerBound(v, l, weight) <= target_) return true;
      }
      return false;
    }
    if ((++visits_ & 255) == 0 && time_limit_ > 0 &&
        Seconds(started_) > time_limit_) {
      timed_out_ = true;
    }
    if (timed_out_) return false;
    const int layer = in_.Layer(v);
    for (int e : in_.sorted_out[v]) {
      const DigraphEdge& edge = in_.d.edge(e);
      const double w = weight + edge.weight;
      std::vector<PhaseLabel> next;
      for (const PhaseLabel& l : labels) {
        std::array<PhaseLabel, 2> ext;
        const int count = in_.Extend(l, layer, edge.op, ext);
        for (int k = 0; k < count; ++k) {
          if (in_.LowerBound(edge.target, ext[k], w) > target_) continue;
          bool dominated = false;
          for (const PhaseLabel& m : next) {
            if (Dominates(m, ext[k])) {
              dominated = true;
              break;
            }
          }
          if (dominated) continue;
          std::erase_if(next,
                        [&](const PhaseLabel& m) { return Dominates(ext[k], m); });
          next.push_back(ext[k]);
        }
      }
      if (next.empty() || Covered(edge.target, w, next)) continue;
      path_.push_back(e);
      if (Dfs(edge.target, w, next)) return true;
      path_.pop_back();
      if (timed_out_) return false;
      failed_[edge.target].push_back({w, std::move(next)});
    }
    return false;
  }

  const Instance& in_;
  const double target_;
  const Clock::time_point started_;
  const double time_limit_;
  std::vector<std::vector<Failed>> failed_;
  std::vector<int> path_;
  int64_t visits_ = 0;
  bool timed_out_ = false;
};

// Optimal contiguous split of a fixed sequence (min alpha), used to seed
// the incumbent.
std::vector<int> MinBottleneckSplit(const Instance& in,
                                    const std::vector<int>& path) {
  const int n = static_cast<int>(path.size());
  const int P = in.phases;
  std::vector<double> prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + in.times[in.d.edge(path[i]).op];
  // best[p][i]: min bottleneck splitting the first i items into p phases.
  std::vector<std::vector<double>> best(P + 1, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<int>> cut(P + 1, std::vector<int>(n + 1, -1));
  best[0][0] = 0.0;
  for (int p = 1; p <= P; ++p) {
    for (int i = p; i <= n; ++i) {
      for (int j = p - 1; j < i; ++j) {
        const double cand = std::max(best[p - 1][j], prefix[i] - prefix[j]);
        if (cand < best[p][i]) {
          best[p][i] = cand;
          cut[p][i] = j;
        }
      }
    }
  }
  std::vector<int> phases(n);
  for (int p = P, i = n; p >= 1; --p) {
    const int j = cut[p][i];
    for (int k = j; k < i; ++k) phases[k] = p - 1;
    i = j;
  }
  return phases;
}

}  // namespace

void BalanceProblem::Validate() const {
  if (digraph == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "balance problem has no digraph");
  }
  if (digraph->start() < 0 || digraph->end() < 0) {
    throw Error(ErrorCode::kPlanningInfeasible, "digraph has no full path");
  }
  const int layers = digraph->num_ops();
  if (phases < 1) {
    throw Error(ErrorCode::kInvalidArgument, "phase count must be positive");
  }
  if (phases > layers) {
    throw Error(ErrorCode::kPlanningInfeasible,
                "cannot fill " + std::to_string(phases) + " phases with " +
                    std::to_string(layers) + " operations");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be in [0, 1]");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument, "c must be positive");
  }
  if (!(gap >= 0.0 && gap < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gap must be in [0, 1)");
  }
  for (double t : digraph->op_times()) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "operation times must be positive");
    }
  }
}

double Solution::RelativeGap() const {
  return (objective - bound) / std::max(objective, 1e-12);
}

double ComposeObjective(double weight, double alpha, double lambda, double c) {
  return (1.0 - lambda) * weight + lambda * c * alpha;
}

double EqualContributionFactor(const CutsetDigraph& d, int phases) {
  if (phases < 1) throw Error(ErrorCode::kInvalidArgument, "P must be >= 1");
  if (d.start() < 0 || d.end() < 0) {
    throw Error(ErrorCode::kPlanningInfeasible, "digraph has no full path");
  }
  const double w_ref = DistancesToEnd(d)[d.start()];
  if (!std::isfinite(w_ref)) {
    throw Error(ErrorCode::kPlanningInfeasible, "digraph has no full path");
  }
  const double total =
      std::accumulate(d.op_times().begin(), d.op_times().end(), 0.0);
  const double alpha_ref = total / phases;
  if (w_ref == 0.0 || !(alpha_ref > 0.0)) return 1.0;
  return w_ref / alpha_ref;
}

Solution SolveBalance(const BalanceProblem& problem) {
  problem.Validate();
  const auto started = Clock::now();
  const Instance in(problem);
  const CutsetDigraph& d = in.d;
  const int P = in.phases;

  // Seed: shortest path with its best split.
  std::vector<int> seed_path;
  for (int v = d.start(); v != d.end(); v = d.edge(in.next_edge[v]).target) {
    seed_path.push_back(in.next_edge[v]);
  }
  Solution incumbent = Evaluate(in, seed_path, MinBottleneckSplit(in, seed_path));

  struct Label {
    int node;
    PhaseLabel phase;
    double weight;
    int parent;
    int edge;
    bool dead;
  };
  std::vector<Label> arena;
  std::vector<std::vector<int>> buckets(static_cast<size_t>(d.num_nodes()) * P);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto gap_slack = [&](double inc) {
    return problem.gap * std::max(inc, 1e-12);
  };
  // Float noise allowance so a branch is never cut on rounding alone.
  auto cut_off = [&](double lb) {
    const double inc = incumbent.objective;
    return lb - 1e-12 * std::max(1.0, std::abs(inc)) >= inc - gap_slack(inc);
  };
  double pruned_min = kInf;

  auto reconstruct = [&](int id, int last_edge, int last_phase) {
    std::vector<int> path;
    std::vector<int> phases;
    path.push_back(last_edge);
    phases.push_back(last_phase);
    for (int k = id; arena[k].parent >= 0; k = arena[k].parent) {
      path.push_back(arena[k].edge);
      phases.push_back(arena[k].phase.phase);
    }
    std::reverse(path.begin(), path.end());
    std::reverse(phases.begin(), phases.end());
    return Evaluate(in, std::move(path), std::move(phases));
  };

  arena.push_back({d.start(), PhaseLabel{}, 0.0, -1, -1, false});
  open.emplace(in.LowerBound(d.start(), PhaseLabel{}, 0.0), 0);

  bool proven = true;
  double bound = kInf;
  int64_t explored = 0;
  while (!open.empty()) {
    const auto [lb, id] = open.top();
    if (cut_off(lb)) {
      bound = lb;
      break;
    }
    open.pop();
    if (arena[id].dead) continue;
    if (problem.time_limit_s > 0 && (explored & 255) == 0 &&
        Seconds(started) > problem.time_limit_s) {
      proven = false;
      bound = lb;
      break;
    }
    ++explored;
    const Label current = arena[id];
    const int layer = in.Layer(current.node);
    for (int e : d.OutEdges(current.node)) {
      const DigraphEdge& edge = d.edge(e);
      const double w = current.weight + edge.weight;
      std::array<PhaseLabel, 2> ext;
      const int count = in.Extend(current.phase, layer, edge.op, ext);
      for (int k = 0; k < count; ++k) {
        const double child_lb = in.LowerBound(edge.target, ext[k], w);
        if (edge.target == d.end()) {
          if (child_lb < incumbent.objective) {
            incumbent = reconstruct(id, e, ext[k].phase);
          }
          continue;
        }
        if (cut_off(child_lb)) {
          pruned_min = std::min(pruned_min, child_lb);
          continue;
        }
        auto& bucket = buckets[static_cast<size_t>(edge.target) * P + ext[k].phase];
        bool dominated = false;
        for (int other : bucket) {
          const Label& o = arena[other];
          if (Dominates(o.phase, ext[k]) && o.weight <= w) {
            dominated = true;
            break;
          }
        }
        if (dominated) continue;
        std::erase_if(bucket, [&](int other) {
          Label& o = arena[other];
          if (Dominates(ext[k], o.phase) && w <= o.weight) {
            o.dead = true;
            return true;
          }
          return false;
        });
        const int child = static_cast<int>(arena.size());
        arena.push_back({edge.target, ext[k], w, id, e, false});
        bucket.push_back(child);
        open.emplace(child_lb, child);
      }
    }
  }
  bound = std::min({bound, pruned_min, incumbent.objective});

  Solution result = incumbent;
  if (proven && problem.gap == 0.0) {
    LexFirstSearch lex(in, incumbent.objective + kTieTolerance, started,
                       problem.time_limit_s);
    const std::vector<int> path = lex.Run();
    if (!path.empty()) {
      const std::vector<int> phases =
          SmallestPhaseSequence(in, path, incumbent.objective + kTieTolerance);
      if (!phases.empty()) result = Evaluate(in, path, phases);
    }
  }
  result.bound = std::min(bound, result.objective);
  result.proven = proven;
  result.states_explored = explored;
  result.wall_seconds = Seconds(started);
  return result;
}

Solution BruteForceBalance(const BalanceProblem& problem, int max_layers) {
  problem.Validate();
  const auto started = Clock::now();
  if (problem.digraph->num_ops() > max_layers) {
    throw Error(ErrorCode::kInstanceTooLarge,
                "brute force is capped at " + std::to_string(max_layers) +
                    " operations");
  }
  const Instance in(problem);
  const int n = in.num_ops;
  const int P = in.phases;

  // Visits (path, phases) pairs: paths in lexicographic operation order,
  // phase sequences in lexicographic order per path. The visitor returns
  // true to stop.
  auto enumerate = [&](const std::function<bool(const std::vector<int>&,
                                                const std::vector<int>&)>& visit) {
    std::vector<int> path;
    std::vector<int> phases(n);
    std::function<bool(int, int)> split = [&](int i, int p) -> bool {
      if (i == n) return p == P - 1 && visit(path, phases);
      const int first = i == 0 ? 0 : p;
      const int last = i == 0 ? 0 : std::min(p + 1, P - 1);
      for (int q = first; q <= last; ++q) {
        if (n - 1 - i < P - 1 - q) continue;
        phases[i] = q;
        if (split(i + 1, q)) return true;
      }
      return false;
    };
    std::function<bool(int)> walk = [&](int v) -> bool {
      if (v == in.d.end()) return split(0, 0);
      for (int e : in.sorted_out[v]) {
        path.push_back(e);
        if (walk(in.d.edge(e).target)) return true;
        path.pop_back();
      }
      return false;
    };
    walk(in.d.start());
  };

  double best = kInf;
  enumerate([&](const std::vector<int>& path, const std::vector<int>& phases) {
    best = std::min(best, Evaluate(in, path, phases).objective);
    return false;
  });
  Solution result;
  enumerate([&](const std::vector<int>& path, const std::vector<int>& phases) {
    Solution s = Evaluate(in, path, phases);
    if (s.objective <= best + kTieTolerance) {
      result = std::move(s);
      return true;
    }
    return false;
  });
  result.bound = std::min(best, result.objective);
  result.proven = true;
  result.wall_seconds = Seconds(started);
  return result;
}

PhaseLoadSummary PhaseLoads(const Solution& s, std::span<const double> times,
                            int phases) {
  PhaseLoadSummary out;
  out.loads.assign(phases, 0.0);
  for (size_t i = 0; i < s.ops.size(); ++i) {
    out.loads[s.layer_phase[i]] += times[s.ops[i]];
  }
  out.alpha = out.loads.empty()
                  ? 0.0
                  : *std::max_element(out.loads.begin(), out.loads.end());
  return out;
}

int CountAttributeChanges(const Solution& s, std::span<const std::string> attr) {
  int changes = 0;
  for (size_t i = 1; i < s.ops.size(); ++i) {
    if (attr[s.ops[i]] != attr[s.ops[i - 1]]) ++changes;
  }
  return changes;
}

std::vector<double> PartialSums(std::span<const double> values) {
  std::vector<double> out(values.size());
  std::partial_sum(values.begin(), values.end(), out.begin());
  return out;
}

std::vector<double> CumulativeAttribute(const Solution& s,
                                        std::span<const double> attr) {
  std::vector<double> seq;
  seq.reserve(s.ops.size());
  for (int op : s.ops) seq.push_back(attr[op]);
  return PartialSums(seq);
}

std::string ExportLp(const BalanceProblem& problem) {
  problem.Validate();
  const CutsetDigraph& d = *problem.digraph;
  const int L = d.num_ops();
  const int P = problem.phases;
  std::ostringstream out;
  out.precision(17);
  auto x = [](int e) { return "x_" + std::to_string(e); };
  auto y = [](int l, int p) {
    return "y_" + std::to_string(l) + "_" + std::to_string(p);
  };
  auto z = [](int o, int p) {
    return "z_" + std::to_string(o) + "_" + std::to_string(p);
  };
  auto sum = [](const std::vector<std::string>& terms) {
    std::string s;
    for (size_t i = 0; i < terms.size(); ++i) {
      if (i > 0) s += " + ";
      s += terms[i];
    }
    return s.empty() ? std::string("0 x_dummy") : s;
  };

  out << "\\ Assembly sequence and line balancing model\n";
  out << "\\ operations " << L << ", phases " << P << ", lambda "
      << problem.lambda << ", c " << problem.c << "\n";
  out << "Minimize\n obj:";
  for (int e = 0; e < d.num_edges(); ++e) {
    out << " + " << (1.0 - problem.lambda) * d.edge(e).weight << " " << x(e);
  }
  out << " + " << problem.lambda * problem.c << " alpha\n";
  out << "Subject To\n";
  {
    std::vector<std::string> t;
    for (int e : d.OutEdges(d.start())) t.push_back(x(e));
    out << " start: " << sum(t) << " = 1\n";
    t.clear();
    for (int e : d.InEdges(d.end())) t.push_back(x(e));
    out << " end: " << sum(t) << " = 1\n";
  }
  for (int v = 0; v < d.num_nodes(); ++v) {
    if (v == d.start() || v == d.end()) continue;
    out << " flow_" << v << ":";
    for (int e : d.InEdges(v)) out << " + " << x(e);
    for (int e : d.OutEdges(v)) out << " - " << x(e);
    out << " = 0\n";
  }
  for (int l = 0; l < L; ++l) {
    std::vector<std::string> t;
    for (int p = 0; p < P; ++p) t.push_back(y(l, p));
    out << " layer_" << l << ": " << sum(t) << " = 1\n";
  }
  for (int l = 1; l < L; ++l) {
    out << " mono_" << l << "_0: " << y(l, 0) << " - " << y(l - 1, 0)
        << " <= 0\n";
    for (int p = 1; p < P; ++p) {
      out << " mono_" << l << "_" << p << ": " << y(l, p) << " - "
          << y(l - 1, p - 1) << " - " << y(l - 1, p) << " <= 0\n";
    }
  }
  for (int o = 0; o < L; ++o) {
    std::vector<std::string> t;
    for (int p = 0; p < P; ++p) t.push_back(z(o, p));
    out << " op_" << o << ": " << sum(t) << " = 1\n";
  }
  for (int e = 0; e < d.num_edges(); ++e) {
    const DigraphEdge& edge = d.edge(e);
    for (int p = 0; p < P; ++p) {
      out << " link_" << e << "_" << p << ": " << z(edge.op, p) << " - " << x(e)
          << " - " << y(edge.layer - 1, p) << " >= -1\n";
    }
  }
  for (int p = 0; p < P; ++p) {
    out << " load_" << p << ": alpha";
    for (int o = 0; o < L; ++o) {
      out << " - " << d.op_times()[o] << " " << z(o, p);
    }
    out << " >= 0\n";
  }
  out << "Bounds\n alpha >= 0\nBinary\n";
  for (int e = 0; e < d.num_edges(); ++e) out << " " << x(e) << "\n";
  for (int l = 0; l < L; ++l) {
    for (int p = 0; p < P; ++p) out << " " << y(l, p) << "\n";
  }
  for (int o = 0; o < L; ++o) {
    for (int p = 0; p < P; ++p) out << " " << z(o, p) << "\n";
  }
  out << "End\n";
  return out.str();
}

std::string SerializeSolution(const Solution& s, const BalanceProblem& problem,
                              const PartGraph* graph) {
  const CutsetDigraph& d = *problem.digraph;
  json doc;
  doc["objective"] = s.objective;
  doc["engineering_cost"] = s.engineering_cost;
  doc["time_cost"] = s.alpha * problem.c;
  doc["alpha"] = s.alpha;
  doc["bound"] = s.bound;
  doc["gap"] = s.RelativeGap();
  doc["proven"] = s.proven;
  doc["phases"] = problem.phases;
  doc["lambda"] = problem.lambda;
  doc["c"] = problem.c;
  doc["phase_loads"] = s.phase_loads;
  doc["operations"] = json::array();
  for (size_t i = 0; i < s.path.size(); ++i) {
    const DigraphEdge& e = d.edge(s.path[i]);
    json op = {{"joint_id", d.op_ids()[e.op]},
               {"layer", e.layer},
               {"phase", s.layer_phase[i]},
               {"time", d.op_times()[e.op]},
               {"weight", e.weight},
               {"handling", e.attrs.handling},
               {"tolerance_norm", e.attrs.tolerance},
               {"technology_code", e.attrs.technology}};
    if (graph != nullptr) {
      if (const auto j = graph->JointIndex(d.op_ids()[e.op])) {
        op["technology"] = graph->joints()[*j].technology;
        op["tolerance"] = graph->joints()[*j].tolerance;
      }
    }
    doc["operations"].push_back(std::move(op));
  }
  doc["solve_wall_time_s"] = s.wall_seconds;
  return doc.dump(2) + "\n";
}

Solution DeserializeSolution(std::string_view document,
                             const BalanceProblem& problem) {
  problem.Validate();
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("solution: ") + e.what());
  }
  const Instance in(problem);
  std::vector<int> path, phases;
  try {
    int v = in.d.start();
    for (const json& op : doc.at("operations")) {
      const std::string id = op.at("joint_id").get<std::string>();
      int found = -1;
      for (int e : in.d.OutEdges(v)) {
        if (in.d.op_ids()[in.d.edge(e).op] == id) found = e;
      }
      if (found < 0) {
        throw Error(ErrorCode::kMalformedDocument,
                    "solution: operation " + id + " is not available here");
      }
      path.push_back(found);
      phases.push_back(op.at("phase").get<int>());
      v = in.d.edge(found).target;
    }
    if (v != in.d.end()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "solution: sequence does not reach the full assembly");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("solution: ") + e.what());
  }
  for (size_t i = 0; i < phases.size(); ++i) {
    const int prev = i == 0 ? 0 : phases[i - 1];
    if (phases[i] < prev || phases[i] > prev + 1 ||
        phases[i] >= problem.phases) {
      throw Error(ErrorCode::kMalformedDocument,
                  "solution: phases must rise by at most one per operation");
    }
  }
  if (phases.back() != problem.phases - 1) {
    throw Error(ErrorCode::kMalformedDocument,
                "solution: not every phase is used");
  }
  Solution s = Evaluate(in, std::move(path), std::move(phases));
  s.bound = doc.value("bound", s.objective);
  s.proven = doc.value("proven", false);
  return s;
}

}  // namespace asmline
