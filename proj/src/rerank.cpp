#include "fairsim/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fairsim {

TargetMode target_mode_from_string(const std::string& name) {
  if (name == "static") return TargetMode::kStatic;
  if (name == "dynamic-literal") return TargetMode::kDynamicLiteral;
  if (name == "dynamic-normalized") return TargetMode::kDynamicNormalized;
  throw std::invalid_argument("unknown target mode: " + name);
}

std::string to_string(TargetMode mode) {
  switch (mode) {
    case TargetMode::kStatic: return "static";
    case TargetMode::kDynamicLiteral: return "dynamic-literal";
    case TargetMode::kDynamicNormalized: return "dynamic-normalized";
  }
  throw std::logic_error("bad target mode");
}

double default_epsilon_exposure(int final_list_length) {
  return 1.0 / std::log2(1.0 + final_list_length);
}

TargetVector static_targets(const RankedLists& long_lists, int final_list_length,
                            int item_count) {
  if (final_list_length <= 0) throw std::invalid_argument("final list length must be positive");
  if (long_lists.empty()) throw std::invalid_argument("long lists are empty");

  TargetVector result;
  result.mode = TargetMode::kStatic;
  result.targets.assign(item_count, 0);

  long long active_users = 0;
  std::vector<std::uint8_t> listed(item_count, 0);
  long long distinct = 0;
  for (const RankedList& list : long_lists) {
    if (list.empty()) continue;
    ++active_users;
    for (int item : list) {
      if (!listed[item]) {
        listed[item] = 1;
        ++distinct;
      }
    }
  }
  if (distinct == 0) return result;

  const int share = static_cast<int>(active_users * final_list_length / distinct);
  for (int item = 0; item < item_count; ++item) {
    if (listed[item]) result.targets[item] = share;
  }
  return result;
}

TargetVector dynamic_targets(const TargetVector& statics,
                             std::span<const double> cumulative_exposure, int round,
                             TargetMode mode, double epsilon, int slot_users,
                             int final_list_length) {
  if (round < 1) throw std::invalid_argument("dynamic targets need round >= 1");
  if (mode != TargetMode::kDynamicLiteral && mode != TargetMode::kDynamicNormalized)
    throw std::invalid_argument("dynamic targets need a dynamic mode");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (cumulative_exposure.size() != statics.targets.size())
    throw std::invalid_argument("exposure vector size does not match targets");

  const bool cold_start =
      std::all_of(cumulative_exposure.begin(), cumulative_exposure.end(),
                  [](double e) { return e == 0.0; });
  if (cold_start) {
    TargetVector result = statics;
    result.mode = mode;
    return result;
  }

  const int item_count = static_cast<int>(statics.targets.size());
  TargetVector result;
  result.mode = mode;
  result.targets.assign(item_count, 0);

  if (mode == TargetMode::kDynamicLiteral) {
    for (int item = 0; item < item_count; ++item) {
      if (statics.targets[item] <= 0) continue;
      const double exposure =
          cumulative_exposure[item] > 0.0 ? cumulative_exposure[item] : epsilon;
      result.targets[item] =
          static_cast<int>(std::floor(statics.targets[item] / exposure));
    }
    return result;
  }

  // kDynamicNormalized: rescale raw inverse-exposure ratios to the slot budget.
  const long long budget =
      static_cast<long long>(slot_users) * final_list_length;
  std::vector<double> raw(item_count, 0.0);
  double raw_sum = 0.0;
  for (int item = 0; item < item_count; ++item) {
    if (statics.targets[item] <= 0) continue;
    raw[item] =
        statics.targets[item] / std::max(cumulative_exposure[item], epsilon);
    raw_sum += raw[item];
  }
  if (raw_sum <= 0.0) {
    result.targets = statics.targets;
    return result;
  }

  long long assigned = 0;
  for (int item = 0; item < item_count; ++item) {
    if (raw[item] <= 0.0) continue;
    const int share = static_cast<int>(
        std::floor(raw[item] * static_cast<double>(budget) / raw_sum));
    result.targets[item] = share;
    assigned += share;
  }

  if (assigned < budget) {
    std::vector<int> order;
    for (int item = 0; item < item_count; ++item) {
      if (statics.targets[item] > 0) order.push_back(item);
    }
    std::sort(order.begin(), order.end(), [&raw](int a, int b) {
      if (raw[a] != raw[b]) return raw[a] > raw[b];
      return a < b;
    });
    while (assigned < budget) {
      for (int item : order) {
        result.targets[item] += 1;
        if (++assigned >= budget) break;
      }
    }
  }
  return result;
}

RerankNetwork build_network(const RankedLists& long_lists, const TargetVector& targets,
                            const RerankConfig& cfg) {
  const int K = cfg.final_list_length;
  const int L = cfg.long_list_length;
  if (K < 0) throw std::invalid_argument("final list length must be nonnegative");
  if (K > L) throw std::invalid_argument("final list length exceeds long list length");

  std::vector<int> active;
  std::vector<std::uint8_t> listed(targets.targets.size(), 0);
  std::vector<int> items;
  if (K > 0) {
    for (int user = 0; user < static_cast<int>(long_lists.size()); ++user) {
      if (static_cast<int>(long_lists[user].size()) < K) continue;
      active.push_back(user);
      for (int item : long_lists[user]) {
        if (!listed[item]) {
          listed[item] = 1;
          items.push_back(item);
        }
      }
    }
  }
  std::sort(items.begin(), items.end());

  const int user_nodes = static_cast<int>(active.size());
  const int item_nodes = static_cast<int>(items.size());
  const int node_count = 2 + user_nodes + item_nodes;
  const int source = 0;
  const int sink = node_count - 1;

  RerankNetwork built{FlowNetwork(std::max(node_count, 2), source,
                                  std::max(node_count, 2) - 1)};
  built.active_users = active;
  built.listed_items = items;
  built.required_flow = static_cast<long long>(user_nodes) * K;

  if (user_nodes == 0) return built;

  long long lambda = cfg.discrepancy_weight;
  if (lambda == 0) {
    lambda = static_cast<long long>(user_nodes) * K * L + 1;
  } else if (lambda <= static_cast<long long>(user_nodes) * L) {
    throw std::invalid_argument(
        "discrepancy weight must exceed active_users * long_list_length");
  }

  std::vector<int> item_node(targets.targets.size(), -1);
  for (int column = 0; column < item_nodes; ++column) {
    item_node[items[column]] = 1 + user_nodes + column;
  }

  built.list_arcs.resize(user_nodes);
  for (int row = 0; row < user_nodes; ++row) {
    built.network.add_arc(source, 1 + row, K, 0);
  }
  for (int row = 0; row < user_nodes; ++row) {
    const RankedList& list = long_lists[active[row]];
    built.list_arcs[row].reserve(list.size());
    for (std::size_t position = 0; position < list.size(); ++position) {
      const int arc = built.network.add_arc(
          1 + row, item_node[list[position]], 1,
          static_cast<long long>(position) + 1);  // cost = 1-based rank
      built.list_arcs[row].push_back(arc);
    }
  }
  built.target_arcs.reserve(item_nodes);
  built.overflow_arcs.reserve(item_nodes);
  for (int column = 0; column < item_nodes; ++column) {
    const int item = items[column];
    built.target_arcs.push_back(
        built.network.add_arc(item_node[item], sink, targets.targets[item], 0));
    built.overflow_arcs.push_back(
        built.network.add_arc(item_node[item], sink, built.required_flow, lambda));
  }
  return built;
}

DiscrepancyStats discrepancy_stats(const RankedLists& final_lists,
                                   const RankedLists& long_lists,
                                   const TargetVector& targets) {
  DiscrepancyStats stats;
  stats.degrees.assign(targets.targets.size(), 0);
  for (const RankedList& list : final_lists) {
    for (int item : list) stats.degrees[item] += 1;
  }
  std::vector<std::uint8_t> listed(targets.targets.size(), 0);
  for (const RankedList& list : long_lists) {
    for (int item : list) listed[item] = 1;
  }
  for (std::size_t item = 0; item < listed.size(); ++item) {
    if (!listed[item]) continue;
    const long long gap = stats.degrees[item] - targets.targets[item];
    stats.l1_discrepancy += std::llabs(gap);
    if (gap > 0) stats.overflow_units += gap;
  }
  return stats;
}

RerankResult rerank(const RankedLists& long_lists, const TargetVector& targets,
                    const RerankConfig& cfg) {
  const int K = cfg.final_list_length;
  RerankNetwork built = build_network(long_lists, targets, cfg);

  RerankResult result;
  result.lists.resize(long_lists.size());

  // Users outside the network take their top-K prefix (whole list when shorter).
  std::vector<std::uint8_t> in_network(long_lists.size(), 0);
  for (int user : built.active_users) in_network[user] = 1;
  for (std::size_t user = 0; user < long_lists.size(); ++user) {
    if (in_network[user]) continue;
    const auto& list = long_lists[user];
    const std::size_t take = std::min<std::size_t>(K, list.size());
    result.lists[user].assign(list.begin(), list.begin() + take);
  }

  if (!built.active_users.empty()) {
    // Overflow arcs make the required flow always feasible; an infeasible
    // network here is an internal construction bug.
    const FlowSolution solution = min_cost_flow(built.network, built.required_flow);
    for (std::size_t row = 0; row < built.active_users.size(); ++row) {
      const int user = built.active_users[row];
      const RankedList& list = long_lists[user];
      auto& out = result.lists[user];
      out.reserve(K);
      for (std::size_t position = 0; position < list.size(); ++position) {
        if (solution.arc_flows[built.list_arcs[row][position]] > 0) {
          out.push_back(list[position]);
          result.rank_cost += static_cast<long long>(position) + 1;
        }
      }
    }
  }

  result.stats = discrepancy_stats(result.lists, long_lists, targets);
  return result;
}

}  // namespace fairsim
