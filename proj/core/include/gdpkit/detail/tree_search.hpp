#pragma once

#include <condition_variable>
#include <cstdint>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "gdpkit/milp.hpp"

namespace gdpkit::detail {

/// Outcome of evaluating one node, in minimization form.
template <class Node>
struct NodeOutcome {
  enum class Kind { kInfeasible, kUnbounded, kFeasible, kBranched };
  Kind kind = Kind::kInfeasible;
  double bound = 0.0;
  std::vector<double> point;
  std::vector<Node> children;
  std::string branch_note;
  std::size_t lp_iterations = 0;
};

struct SearchSettings {
  int workers = 1;
  double gap_rel = 1e-6;
  std::size_t node_limit = 1'000'000;
  /// -1 converts minimization-form values to a maximization report.
  double report_sign = 1.0;
};

/// Best-first tree search shared by the MILP and disjunctive branch and bound.
/// `describe(node)` labels a node for the log; `evaluate(node)` solves it.
/// Ties in the open list are resolved by creation order.
template <class Node, class Evaluate, class Describe>
MipSolution best_first_search(Node root, Evaluate evaluate, Describe describe,
                              const SearchSettings& settings) {
  using Outcome = NodeOutcome<Node>;
  struct Open {
    double bound;
    std::uint64_t seq;
    Node node;
  };
  struct Later {
    bool operator()(const Open& a, const Open& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.seq > b.seq;
    }
  };

  const double sign = settings.report_sign;
  std::mutex mutex;
  std::condition_variable wake;
  std::priority_queue<Open, std::vector<Open>, Later> open;
  std::multiset<double> in_flight;
  std::uint64_t next_seq = 0;
  std::size_t next_id = 0;
  bool unbounded = false;
  bool limit_hit = false;
  std::optional<double> incumbent;
  // Smallest bound discarded by the gap test.
  std::optional<double> cleared;
  MipSolution result;

  open.push(Open{-std::numeric_limits<double>::infinity(), next_seq++,
                 std::move(root)});

  auto prunable = [&](double bound) {
    return incumbent &&
           bound >= *incumbent - gap_tolerance(settings.gap_rel, *incumbent);
  };
  auto global_bound = [&]() {
    double bound = std::numeric_limits<double>::infinity();
    if (!open.empty()) bound = open.top().bound;
    if (!in_flight.empty()) bound = std::min(bound, *in_flight.begin());
    if (incumbent) bound = std::min(bound, *incumbent);
    if (cleared) bound = std::min(bound, *cleared);
    return bound;
  };
  auto sample = [&]() {
    BoundSample s;
    s.has_incumbent = incumbent.has_value();
    s.incumbent = incumbent ? sign * *incumbent : 0.0;
    s.bound = sign * global_bound();
    result.trace.push_back(s);
  };

  auto worker = [&]() {
    std::unique_lock lock(mutex);
    while (true) {
      wake.wait(lock, [&] {
        return !open.empty() || in_flight.empty() || unbounded || limit_hit;
      });
      if (unbounded || limit_hit) return;
      if (open.empty()) {
        if (in_flight.empty()) return;
        continue;
      }
      if (prunable(open.top().bound)) {
        // Everything left is at least as bad as the top.
        cleared = std::min(cleared.value_or(open.top().bound), open.top().bound);
        while (!open.empty()) open.pop();
        if (in_flight.empty()) {
          wake.notify_all();
          return;
        }
        continue;
      }
      if (result.nodes >= settings.node_limit) {
        limit_hit = true;
        wake.notify_all();
        return;
      }
      Open current = std::move(const_cast<Open&>(open.top()));
      open.pop();
      const std::size_t id = next_id++;
      ++result.nodes;
      auto flight = in_flight.insert(current.bound);
      lock.unlock();

      Outcome outcome = evaluate(current.node);
      NodeRecord record{id, describe(current.node), sign * outcome.bound, {}};

      lock.lock();
      in_flight.erase(flight);
      result.lp_iterations += outcome.lp_iterations;
      switch (outcome.kind) {
        case Outcome::Kind::kInfeasible:
          record.action = "infeasible";
          break;
        case Outcome::Kind::kUnbounded:
          record.action = "unbounded";
          unbounded = true;
          break;
        case Outcome::Kind::kFeasible:
          if (!incumbent || outcome.bound < *incumbent) {
            incumbent = outcome.bound;
            result.point = std::move(outcome.point);
            record.action = "incumbent";
          } else {
            record.action = "feasible-dominated";
          }
          break;
        case Outcome::Kind::kBranched:
          if (prunable(outcome.bound)) {
            record.action = "pruned";
          } else {
            record.action = "branch " + outcome.branch_note;
            for (auto& child : outcome.children) {
              open.push(Open{outcome.bound, next_seq++, std::move(child)});
            }
          }
          break;
      }
      result.log.push_back(std::move(record));
      sample();
      wake.notify_all();
    }
  };

  const int workers = std::max(1, settings.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  if (unbounded) {
    result.status = SolveStatus::kUnbounded;
  } else if (limit_hit) {
    result.status = SolveStatus::kLimit;
    if (incumbent) result.objective = sign * *incumbent;
    result.best_bound = sign * global_bound();
  } else if (incumbent) {
    result.status = SolveStatus::kOptimal;
    result.objective = sign * *incumbent;
    result.best_bound = sign * global_bound();
  } else {
    result.status = SolveStatus::kInfeasible;
  }
  return result;
}

}  // namespace gdpkit::detail
