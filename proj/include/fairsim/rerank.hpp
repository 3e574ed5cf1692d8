#pragma once

#include <span>
#include <string>
#include <vector>

#include "fairsim/flow.hpp"
#include "fairsim/types.hpp"

namespace fairsim {

enum class TargetMode { kStatic, kDynamicLiteral, kDynamicNormalized };

TargetMode target_mode_from_string(const std::string& name);
std::string to_string(TargetMode mode);

// Per-item exposure-slot targets for one round. Items absent from the
// round's long lists always have target 0.
struct TargetVector {
  std::vector<int> targets;  // full catalog, indexed by item id
  TargetMode mode = TargetMode::kStatic;
};

struct RerankConfig {
  int final_list_length = 10;   // K
  int long_list_length = 40;    // L
  // Cost of each over-target assignment unit. 0 selects
  // active_users * K * L + 1, which exceeds any achievable total rank
  // cost and therefore makes overflow minimization strictly dominate.
  long long discrepancy_weight = 0;
  TargetMode target_mode = TargetMode::kDynamicNormalized;
  // Guard for items with zero cumulative exposure in dynamic targets.
  // 0 selects 1/log2(1 + K), the exposure of a single bottom-of-list slot.
  double epsilon_exposure = 0.0;
};

double default_epsilon_exposure(int final_list_length);

// Equal split of the round's n_active * K recommendation slots over the
// distinct items appearing in the long lists: each listed item gets
// floor(n_active * K / distinct_listed_items).
TargetVector static_targets(const RankedLists& long_lists, int final_list_length,
                            int item_count);

// Reweights the static targets by inverse cumulative exposure.
// kDynamicLiteral: floor(static(i) / E(i)), with E(i) replaced by epsilon
// when zero. kDynamicNormalized: raw(i) = static(i) / max(E(i), epsilon),
// floored after rescaling so the targets sum to the slot budget
// slot_users * K, then topped up one unit at a time in descending raw
// order (ties by ascending item id). With an all-zero exposure history
// both modes return the static targets unchanged.
TargetVector dynamic_targets(const TargetVector& static_targets,
                             std::span<const double> cumulative_exposure, int round,
                             TargetMode mode, double epsilon, int slot_users,
                             int final_list_length);

// Bipartite selection network over the long lists. Users with lists
// shorter than K are left out (their final list is their whole long list);
// the rest get a source arc of capacity K, unit-capacity arcs to their
// listed items costing the 1-based list rank, and each listed item routes
// to the sink through a free arc capped at its target plus an overflow arc
// costing the discrepancy weight.
struct RerankNetwork {
  FlowNetwork network;
  long long required_flow = 0;
  std::vector<int> active_users;
  std::vector<std::vector<int>> list_arcs;  // per active user, arc id per list position
  std::vector<int> listed_items;            // network item column -> item id
  std::vector<int> target_arcs;             // per item column
  std::vector<int> overflow_arcs;           // per item column
};

RerankNetwork build_network(const RankedLists& long_lists, const TargetVector& targets,
                            const RerankConfig& cfg);

// Degree bookkeeping of final lists against a target vector, over the
// items appearing in the given long lists.
struct DiscrepancyStats {
  long long l1_discrepancy = 0;   // sum over listed items of |degree - target|
  long long overflow_units = 0;   // sum over listed items of max(0, degree - target)
  std::vector<int> degrees;       // full catalog
};

DiscrepancyStats discrepancy_stats(const RankedLists& final_lists,
                                   const RankedLists& long_lists,
                                   const TargetVector& targets);

struct RerankResult {
  RankedLists lists;
  long long rank_cost = 0;  // sum of selected items' long-list ranks (network users)
  DiscrepancyStats stats;
};

// Solves the selection network and extracts final lists of length K,
// ordered by long-list rank. Excluded users keep their top-K prefix.
RerankResult rerank(const RankedLists& long_lists, const TargetVector& targets,
                    const RerankConfig& cfg);

}  // namespace fairsim
