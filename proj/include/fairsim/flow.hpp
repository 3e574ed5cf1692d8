#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fairsim {

struct FlowArc {
  int from = 0;
  int to = 0;
  long long capacity = 0;
  long long cost = 0;
};

// Directed flow network over dense node ids [0, node_count).
// Capacities and costs are integral; callers must keep
// max_flow * max_|cost| within long long range.
class FlowNetwork {
 public:
  FlowNetwork(int node_count, int source, int sink);

  // Returns the arc id. Self-loops and negative capacities are rejected.
  int add_arc(int from, int to, long long capacity, long long cost);

  int node_count() const { return node_count_; }
  int source() const { return source_; }
  int sink() const { return sink_; }
  const std::vector<FlowArc>& arcs() const { return arcs_; }

 private:
  int node_count_;
  int source_;
  int sink_;
  std::vector<FlowArc> arcs_;
};

struct FlowSolution {
  std::vector<long long> arc_flows;  // indexed by arc id
  long long total_cost = 0;
  long long flow_value = 0;
};

class InfeasibleFlowError : public std::runtime_error {
 public:
  InfeasibleFlowError(long long required, long long achieved);
  long long required() const { return required_; }
  long long achieved() const { return achieved_; }

 private:
  long long required_;
  long long achieved_;
};

// Minimum-cost flow of exactly `required_flow` units, by successive
// shortest augmenting paths over reduced costs. Node potentials keep
// reduced costs nonnegative; an initial Bellman-Ford pass handles
// networks with negative original costs. Path searches visit arcs in
// insertion order, so equal-cost solutions are reproducible.
FlowSolution min_cost_flow(const FlowNetwork& net, long long required_flow);

// Value of a maximum source-sink flow (costs ignored).
long long max_flow_value(const FlowNetwork& net);

// DIMACS-like text dumps for debugging. Format:
//   p <node_count> <arc_count> <source> <sink>
//   a <from> <to> <capacity> <cost>        one line per arc, in arc-id order
// and for solutions additionally:
//   s <flow_value> <total_cost>
//   f <arc_id> <flow>                      one line per arc with nonzero flow
std::string to_dimacs(const FlowNetwork& net);
std::string to_dimacs(const FlowNetwork& net, const FlowSolution& solution);

}  // namespace fairsim
