#include "costar/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "costar/error.hpp"

namespace costar {

CollabNetwork::CollabNetwork(PeriodSpec period, std::vector<NodeAttributes> nodes,
                             std::vector<WeightedEdge> edges, std::vector<std::string> keys)
    : period_(std::move(period)),
      nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      keys_(std::move(keys)) {
    if (!keys_.empty() && keys_.size() != nodes_.size()) {
        throw std::invalid_argument("CollabNetwork: keys and nodes differ in length");
    }
    const auto n = nodes_.size();
    for (auto& e : edges_) {
        if (e.edge.u == e.edge.v) {
            throw std::invalid_argument("CollabNetwork: self-loop on node " +
                                        std::to_string(e.edge.u.value));
        }
        if (e.edge.u.value >= n || e.edge.v.value >= n) {
            throw std::invalid_argument("CollabNetwork: edge endpoint out of range");
        }
        if (e.weight < 1) throw std::invalid_argument("CollabNetwork: edge weight < 1");
        e.edge = Edge::normalized(e.edge.u, e.edge.v);
    }
    index();
}

void CollabNetwork::index() {
    const auto n = nodes_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++offsets_[e.edge.u.value + 1];
        ++offsets_[e.edge.v.value + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());

    std::vector<std::pair<NodeId, int>> slots(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
        slots[fill[e.edge.u.value]++] = {e.edge.v, e.weight};
        slots[fill[e.edge.v.value]++] = {e.edge.u, e.weight};
    }

    adjacency_.resize(slots.size());
    weight_of_.resize(slots.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto first = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        auto last = slots.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        if (std::adjacent_find(first, last, [](const auto& a, const auto& b) {
                return a.first == b.first;
            }) != last) {
            throw std::invalid_argument("CollabNetwork: duplicate edge at node " +
                                        std::to_string(i));
        }
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
        adjacency_[k] = slots[k].first;
        weight_of_[k] = slots[k].second;
    }
}

const std::string& CollabNetwork::key(NodeId id) const {
    static const std::string kEmpty;
    return keys_.empty() ? kEmpty : keys_.at(id.value);
}

std::span<const NodeId> CollabNetwork::neighbors(NodeId id) const {
    if (id.value >= nodes_.size()) throw std::out_of_range("CollabNetwork: node out of range");
    return std::span<const NodeId>(adjacency_).subspan(offsets_[id.value],
                                                       offsets_[id.value + 1] - offsets_[id.value]);
}

bool CollabNetwork::has_edge(NodeId a, NodeId b) const { return weight(a, b) > 0; }

int CollabNetwork::weight(NodeId a, NodeId b) const {
    if (a == b) return 0;
    auto nb = neighbors(a);
    auto it = std::lower_bound(nb.begin(), nb.end(), b);
    if (it == nb.end() || *it != b) return 0;
    return weight_of_[offsets_[a.value] + static_cast<std::size_t>(it - nb.begin())];
}

CollabNetwork CollabNetwork::with_edge(NodeId a, NodeId b) const {
    if (has_edge(a, b)) return *this;
    auto edges = edges_;
    edges.push_back({Edge::normalized(a, b), 1});
    return CollabNetwork(period_, nodes_, std::move(edges), keys_);
}

CollabNetwork CollabNetwork::without_edge(NodeId a, NodeId b) const {
    const auto target = Edge::normalized(a, b);
    auto edges = edges_;
    std::erase_if(edges, [&](const WeightedEdge& e) { return e.edge == target; });
    return CollabNetwork(period_, nodes_, std::move(edges), keys_);
}

CollabNetwork CollabNetwork::with_edge_set(std::vector<Edge> edges) const {
    std::vector<WeightedEdge> weighted;
    weighted.reserve(edges.size());
    for (const auto& e : edges) weighted.push_back({e, 1});
    return CollabNetwork(period_, nodes_, std::move(weighted), keys_);
}

std::vector<std::size_t> degree_sequence(const CollabNetwork& g) {
    std::vector<std::size_t> out(g.node_count());
    for (std::uint32_t i = 0; i < out.size(); ++i) out[i] = g.degree(NodeId{i});
    return out;
}

double average_degree(const CollabNetwork& g) {
    if (g.node_count() == 0) throw UndefinedInputError("average degree of an empty graph");
    return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

namespace {

// Number of edges among the neighbours of v.
std::size_t closed_pairs(const CollabNetwork& g, NodeId v) {
    auto nb = g.neighbors(v);
    std::size_t links = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
        auto inner = g.neighbors(nb[i]);
        // count members of nb after position i that are adjacent to nb[i]
        auto a = nb.begin() + static_cast<std::ptrdiff_t>(i) + 1;
        auto b = inner.begin();
        while (a != nb.end() && b != inner.end()) {
            if (*a < *b) {
                ++a;
            } else if (*b < *a) {
                ++b;
            } else {
                ++links;
                ++a;
                ++b;
            }
        }
    }
    return links;
}

}  // namespace

double average_clustering(const CollabNetwork& g) {
    if (g.node_count() == 0) throw UndefinedInputError("clustering of an empty graph");
    double total = 0.0;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const NodeId v{i};
        const double k = static_cast<double>(g.degree(v));
        if (k < 2) continue;
        total += static_cast<double>(closed_pairs(g, v)) / (k * (k - 1) / 2.0);
    }
    return total / static_cast<double>(g.node_count());
}

double transitivity(const CollabNetwork& g) {
    double closed = 0.0;
    double triples = 0.0;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const NodeId v{i};
        const double k = static_cast<double>(g.degree(v));
        triples += k * (k - 1) / 2.0;
        closed += static_cast<double>(closed_pairs(g, v));
    }
    return triples > 0 ? closed / triples : 0.0;
}

double density(const CollabNetwork& g) {
    const auto n = static_cast<double>(g.node_count());
    if (n < 2) throw UndefinedInputError("density needs at least two nodes");
    return static_cast<double>(g.edge_count()) / (n * (n - 1) / 2.0);
}

}  // namespace costar
