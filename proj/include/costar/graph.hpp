#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costar/region.hpp"

namespace costar {

// Dense index of a node inside one CollabNetwork (0..n-1).
struct NodeId {
    std::uint32_t value = 0;
    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

// Named, inclusive [start_year, end_year] window.
struct PeriodSpec {
    std::string label;
    int start_year = 0;
    int end_year = 0;

    bool contains(int year) const { return year >= start_year && year <= end_year; }
    int length() const { return end_year - start_year + 1; }
    // Integer midpoint, rounded down: 1990-1993 -> 1991.
    int midpoint_year() const { return start_year + (end_year - start_year) / 2; }

    friend bool operator==(const PeriodSpec&, const PeriodSpec&) = default;
};

struct NodeAttributes {
    Region region = Region::Other;
    std::optional<int> birth_year;
    int first_work_year = 0;
    // Lagged popularity: co-starring events in the previous period.
    int prev_cooperation_count = 0;
    bool prev_cross_region = false;

    friend bool operator==(const NodeAttributes&, const NodeAttributes&) = default;
};

// Unordered pair stored with u < v.
struct Edge {
    NodeId u;
    NodeId v;

    static Edge normalized(NodeId a, NodeId b) { return a < b ? Edge{a, b} : Edge{b, a}; }
    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

struct WeightedEdge {
    Edge edge;
    int weight = 1;
};

// Immutable simple undirected graph with per-node attributes and per-edge
// co-starring counts. Iteration order of nodes and edges is the construction
// order.
class CollabNetwork {
public:
    CollabNetwork() = default;

    // Throws std::invalid_argument on self-loops, duplicate edges, node ids
    // out of range, weights < 1, or a keys vector of the wrong length.
    CollabNetwork(PeriodSpec period, std::vector<NodeAttributes> nodes,
                  std::vector<WeightedEdge> edges, std::vector<std::string> keys = {});

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty(); }

    const PeriodSpec& period() const { return period_; }
    std::span<const NodeAttributes> nodes() const { return nodes_; }
    const NodeAttributes& attributes(NodeId id) const { return nodes_.at(id.value); }

    std::span<const WeightedEdge> edges() const { return edges_; }

    // External key of the node (star id); empty when the graph was built
    // without keys.
    const std::string& key(NodeId id) const;
    std::span<const std::string> keys() const { return keys_; }

    // Sorted ascending.
    std::span<const NodeId> neighbors(NodeId id) const;
    std::size_t degree(NodeId id) const { return neighbors(id).size(); }
    bool has_edge(NodeId a, NodeId b) const;
    // 0 when the edge is absent.
    int weight(NodeId a, NodeId b) const;

    // Copies with one dyad toggled. Added edges get weight 1.
    CollabNetwork with_edge(NodeId a, NodeId b) const;
    CollabNetwork without_edge(NodeId a, NodeId b) const;
    // Same nodes, attributes and period; edge set replaced (all weights 1).
    CollabNetwork with_edge_set(std::vector<Edge> edges) const;

private:
    void index();

    PeriodSpec period_;
    std::vector<NodeAttributes> nodes_;
    std::vector<WeightedEdge> edges_;
    std::vector<std::string> keys_;
    // CSR adjacency; weight_of_[k] matches adjacency_[k].
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
    std::vector<int> weight_of_;
};

std::vector<std::size_t> degree_sequence(const CollabNetwork& g);

// 2|E|/|V|. Throws UndefinedInputError on a graph without nodes.
double average_degree(const CollabNetwork& g);

// Mean local clustering; nodes of degree < 2 contribute 0.
double average_clustering(const CollabNetwork& g);

// 3 x triangles / connected triples; 0 when there are no triples.
double transitivity(const CollabNetwork& g);

// |E| / C(|V|, 2). Throws UndefinedInputError when |V| < 2.
double density(const CollabNetwork& g);

}  // namespace costar
