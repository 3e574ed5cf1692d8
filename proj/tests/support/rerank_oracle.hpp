#pragma once

#include <algorithm>
#include <vector>

#include "fairsim/rerank.hpp"
#include "fairsim/types.hpp"

namespace testsupport {

// Exhaustive search over every assignment of a K-subset of each user's
// long list: lexicographic optimum of (overflow units, total rank cost).
// Only meaningful on instances where every list has at least K items.
struct AssignmentOptimum {
  long long overflow_units = 0;
  long long rank_cost = 0;
};

inline AssignmentOptimum brute_force_optimum(const fairsim::RankedLists& long_lists,
                                             const fairsim::TargetVector& targets, int k) {
  const int users = static_cast<int>(long_lists.size());
  std::vector<std::vector<int>> chosen(users);  // selected positions per user

  AssignmentOptimum best{-1, -1};
  std::vector<int> degrees(targets.targets.size(), 0);

  auto evaluate = [&]() {
    long long overflow = 0;
    std::fill(degrees.begin(), degrees.end(), 0);
    long long rank_cost = 0;
    for (int u = 0; u < users; ++u) {
      for (int position : chosen[u]) {
        degrees[long_lists[u][position]] += 1;
        rank_cost += position + 1;
      }
    }
    for (std::size_t item = 0; item < degrees.size(); ++item) {
      const long long gap = degrees[item] - targets.targets[item];
      if (gap > 0) overflow += gap;
    }
    if (best.overflow_units < 0 || overflow < best.overflow_units ||
        (overflow == best.overflow_units && rank_cost < best.rank_cost)) {
      best = {overflow, rank_cost};
    }
  };

  // Enumerate K-subsets per user via positions in lexicographic order.
  auto recurse = [&](auto&& self, int user) -> void {
    if (user == users) {
      evaluate();
      return;
    }
    const int len = static_cast<int>(long_lists[user].size());
    std::vector<int>& picks = chosen[user];
    picks.assign(k, 0);
    auto subsets = [&](auto&& inner, int index, int from) -> void {
      if (index == k) {
        self(self, user + 1);
        return;
      }
      for (int position = from; position <= len - (k - index); ++position) {
        picks[index] = position;
        inner(inner, index + 1, position + 1);
      }
    };
    subsets(subsets, 0, 0);
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace testsupport
