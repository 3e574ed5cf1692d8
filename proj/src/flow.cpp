#include "fairsim/flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <sstream>

namespace fairsim {

namespace {

constexpr long long kInfCost = std::numeric_limits<long long>::max() / 4;

// Residual edge store: forward edges at even indices, reverse at odd.
struct Residual {
  struct Edge {
    int to;
    long long capacity;
    long long cost;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> adjac; // per node, edge ids in insertion order

  explicit Residual(const FlowNetwork& net) : adjac(net.node_count()) {
    edges.reserve(net.arcs().size() * 2);
    for (const FlowArc& arc : net.arcs()) {
      adjac[arc.from].push_back(static_cast<int>(edges.size()));
      edges.push_back({arc.to, arc.capacity, arc.cost});
      adjac[arc.to].push_back(static_cast<int>(edges.size()));
      edges.push_back({arc.from, 0, -arc.cost});
    }
  }
};

}  // namespace

FlowNetwork::FlowNetwork(int node_count, int source, int sink)
    : node_count_(node_count), source_(source), sink_(sink) {
  if (node_count < 2) throw std::invalid_argument("flow network needs at least 2 nodes");
  if (source < 0 || source >= node_count || sink < 0 || sink >= node_count)
    throw std::invalid_argument("flow network source/sink out of range");
  if (source == sink) throw std::invalid_argument("flow network source equals sink");
}

int FlowNetwork::add_arc(int from, int to, long long capacity, long long cost) {
  if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_)
    throw std::invalid_argument("flow arc endpoint out of range");
  if (from == to) throw std::invalid_argument("flow arc is a self-loop");
  if (capacity < 0) throw std::invalid_argument("flow arc has negative capacity");
  arcs_.push_back({from, to, capacity, cost});
  return static_cast<int>(arcs_.size()) - 1;
}

InfeasibleFlowError::InfeasibleFlowError(long long required, long long achieved)
    : std::runtime_error("infeasible flow: required " + std::to_string(required) +
                         ", max achievable " + std::to_string(achieved)),
      required_(required),
      achieved_(achieved) {}

FlowSolution min_cost_flow(const FlowNetwork& net, long long required_flow) {
  if (required_flow < 0) throw std::invalid_argument("required_flow must be nonnegative");

  const int n = net.node_count();
  const int s = net.source();
  const int t = net.sink();
  Residual res(net);

  std::vector<long long> potential(n, 0);

  // Initial potential pass: only needed when some original cost is negative.
  bool has_negative = false;
  for (const FlowArc& arc : net.arcs()) {
    if (arc.cost < 0) {
      has_negative = true;
      break;
    }
  }
  if (has_negative) {
    std::vector<long long> dist(n, kInfCost);
    dist[s] = 0;
    for (int pass = 0; pass < n; ++pass) {
      bool changed = false;
      for (const FlowArc& arc : net.arcs()) {
        if (arc.capacity > 0 && dist[arc.from] < kInfCost &&
            dist[arc.from] + arc.cost < dist[arc.to]) {
          dist[arc.to] = dist[arc.from] + arc.cost;
          changed = true;
        }
      }
      if (!changed) break;
      if (pass == n - 1) throw std::invalid_argument("negative-cost cycle in flow network");
    }
    for (int v = 0; v < n; ++v) potential[v] = dist[v] < kInfCost ? dist[v] : 0;
  }

  FlowSolution solution;
  solution.arc_flows.assign(net.arcs().size(), 0);

  std::vector<long long> dist(n);
  std::vector<int> parent_edge(n);

  while (solution.flow_value < required_flow) {
    // Dijkstra on reduced costs, ties resolved by node id.
    std::fill(dist.begin(), dist.end(), kInfCost);
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    dist[s] = 0;
    using Entry = std::pair<long long, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    heap.push({0, s});
    while (!heap.empty()) {
      auto [d, v] = heap.top();
      heap.pop();
      if (d > dist[v]) continue;
      for (int edge_id : res.adjac[v]) {
        const auto& edge = res.edges[edge_id];
        if (edge.capacity <= 0) continue;
        const long long nd = d + edge.cost + potential[v] - potential[edge.to];
        if (nd < dist[edge.to]) {
          dist[edge.to] = nd;
          parent_edge[edge.to] = edge_id;
          heap.push({nd, edge.to});
        }
      }
    }
    if (dist[t] >= kInfCost) {
      // No augmenting path left: current value is the maximum flow.
      throw InfeasibleFlowError(required_flow, solution.flow_value);
    }
    for (int v = 0; v < n; ++v) {
      if (dist[v] < kInfCost) potential[v] += dist[v];
    }

    long long push = required_flow - solution.flow_value;
    for (int v = t; v != s;) {
      const auto& edge = res.edges[parent_edge[v]];
      push = std::min(push, edge.capacity);
      v = res.edges[parent_edge[v] ^ 1].to;
    }
    for (int v = t; v != s;) {
      const int edge_id = parent_edge[v];
      res.edges[edge_id].capacity -= push;
      res.edges[edge_id ^ 1].capacity += push;
      solution.total_cost += res.edges[edge_id].cost * push;
      if (edge_id % 2 == 0) {
        solution.arc_flows[edge_id / 2] += push;
      } else {
        solution.arc_flows[edge_id / 2] -= push;
      }
      v = res.edges[edge_id ^ 1].to;
    }
    solution.flow_value += push;
  }

  return solution;
}

long long max_flow_value(const FlowNetwork& net) {
  const int n = net.node_count();
  const int s = net.source();
  const int t = net.sink();
  Residual res(net);

  long long total = 0;
  std::vector<int> parent_edge(n);
  while (true) {
    // BFS augmenting path (Edmonds-Karp).
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    std::queue<int> queue;
    queue.push(s);
    std::vector<char> visited(n, 0);
    visited[s] = 1;
    while (!queue.empty() && !visited[t]) {
      const int v = queue.front();
      queue.pop();
      for (int edge_id : res.adjac[v]) {
        const auto& edge = res.edges[edge_id];
        if (edge.capacity <= 0 || visited[edge.to]) continue;
        visited[edge.to] = 1;
        parent_edge[edge.to] = edge_id;
        queue.push(edge.to);
      }
    }
    if (!visited[t]) break;
    long long push = std::numeric_limits<long long>::max();
    for (int v = t; v != s;) {
      push = std::min(push, res.edges[parent_edge[v]].capacity);
      v = res.edges[parent_edge[v] ^ 1].to;
    }
    for (int v = t; v != s;) {
      res.edges[parent_edge[v]].capacity -= push;
      res.edges[parent_edge[v] ^ 1].capacity += push;
      v = res.edges[parent_edge[v] ^ 1].to;
    }
    total += push;
  }
  return total;
}

std::string to_dimacs(const FlowNetwork& net) {
  std::ostringstream out;
  out << "p " << net.node_count() << ' ' << net.arcs().size() << ' ' << net.source()
      << ' ' << net.sink() << '\n';
  for (const FlowArc& arc : net.arcs()) {
    out << "a " << arc.from << ' ' << arc.to << ' ' << arc.capacity << ' ' << arc.cost
        << '\n';
  }
  return out.str();
}

std::string to_dimacs(const FlowNetwork& net, const FlowSolution& solution) {
  std::ostringstream out;
  out << to_dimacs(net);
  out << "s " << solution.flow_value << ' ' << solution.total_cost << '\n';
  for (std::size_t id = 0; id < solution.arc_flows.size(); ++id) {
    if (solution.arc_flows[id] != 0) out << "f " << id << ' ' << solution.arc_flows[id] << '\n';
  }
  return out.str();
}

}  // namespace fairsim
