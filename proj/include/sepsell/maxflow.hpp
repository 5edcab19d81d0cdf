#pragma once

#include <cstdint>
#include <vector>

namespace sepsell {

struct FlowEdge {
  int from;
  int to;
  std::int64_t capacity;
};

struct MaxFlowResult {
  std::int64_t value;
  /// Nodes reachable from the source in the residual graph (a minimum cut).
  std::vector<char> source_side;
};

MaxFlowResult max_flow(int num_nodes, const std::vector<FlowEdge>& edges, int source, int sink);

}  // namespace sepsell
