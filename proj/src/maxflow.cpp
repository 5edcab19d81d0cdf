#include "sepsell/maxflow.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>
#include <queue>

namespace sepsell {

namespace {

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using Graph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<boost::edge_capacity_t, std::int64_t,
                    boost::property<boost::edge_residual_capacity_t, std::int64_t,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

}  // namespace

MaxFlowResult max_flow(int num_nodes, const std::vector<FlowEdge>& edges, int source, int sink) {
  Graph g(num_nodes);
  auto cap = boost::get(boost::edge_capacity, g);
  auto rev = boost::get(boost::edge_reverse, g);
  auto res = boost::get(boost::edge_residual_capacity, g);
  for (const auto& e : edges) {
    auto fwd = boost::add_edge(e.from, e.to, g).first;
    auto back = boost::add_edge(e.to, e.from, g).first;
    cap[fwd] = e.capacity;
    cap[back] = 0;
    rev[fwd] = back;
    rev[back] = fwd;
  }
  MaxFlowResult out;
  out.value = boost::push_relabel_max_flow(g, source, sink);

  out.source_side.assign(num_nodes, 0);
  std::queue<int> frontier;
  frontier.push(source);
  out.source_side[source] = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (auto [it, end] = boost::out_edges(u, g); it != end; ++it) {
      const int v = static_cast<int>(boost::target(*it, g));
      if (res[*it] > 0 && !out.source_side[v]) {
        out.source_side[v] = 1;
        frontier.push(v);
      }
    }
  }
  return out;
}

}  // namespace sepsell
