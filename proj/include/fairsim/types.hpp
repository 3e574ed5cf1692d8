#pragma once

#include <vector>

namespace fairsim {

// Ranked recommendation list for one user: item ids, best first.
using RankedList = std::vector<int>;

// Per-user lists, indexed by dense user id.
using RankedLists = std::vector<RankedList>;

}  // namespace fairsim
