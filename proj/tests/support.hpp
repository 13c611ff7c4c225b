#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "costar/graph.hpp"
#include "costar/rng.hpp"

namespace testing {

using costar::CollabNetwork;
using costar::Edge;
using costar::NodeAttributes;
using costar::NodeId;
using costar::Region;
using costar::WeightedEdge;

inline const costar::PeriodSpec kPeriod{"2000-2003", 2000, 2003};

inline std::vector<NodeAttributes> nodes_of(const std::vector<Region>& regions) {
    std::vector<NodeAttributes> nodes(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        nodes[i].region = regions[i];
        nodes[i].first_work_year = 1995;
    }
    return nodes;
}

inline CollabNetwork graph(std::vector<NodeAttributes> nodes,
                           const std::vector<std::pair<unsigned, unsigned>>& edges,
                           const std::vector<int>& weights = {}) {
    std::vector<WeightedEdge> list;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        list.push_back({Edge::normalized(NodeId{edges[k].first}, NodeId{edges[k].second}),
                        weights.empty() ? 1 : weights[k]});
    }
    return CollabNetwork(kPeriod, std::move(nodes), std::move(list));
}

inline CollabNetwork graph(std::size_t n, const std::vector<std::pair<unsigned, unsigned>>& edges) {
    return graph(nodes_of(std::vector<Region>(n, Region::Mainland)), edges);
}

// G(n, m) with uniformly random distinct edges.
inline CollabNetwork random_graph(std::vector<NodeAttributes> nodes, std::size_t m, costar::Rng& rng) {
    const auto n = nodes.size();
    std::set<std::pair<unsigned, unsigned>> chosen;
    while (chosen.size() < m) {
        auto a = static_cast<unsigned>(costar::uniform_below(rng, n));
        auto b = static_cast<unsigned>(costar::uniform_below(rng, n));
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        chosen.insert({a, b});
    }
    return graph(std::move(nodes), {chosen.begin(), chosen.end()});
}

// Regions drawn uniformly from Mainland/HongKong/Taiwan; numeric fields random.
inline std::vector<NodeAttributes> random_nodes(std::size_t n, costar::Rng& rng) {
    std::vector<NodeAttributes> nodes(n);
    for (auto& v : nodes) {
        v.region = static_cast<Region>(costar::uniform_below(rng, 3));
        v.birth_year = 1950 + static_cast<int>(costar::uniform_below(rng, 40));
        v.first_work_year = 1975 + static_cast<int>(costar::uniform_below(rng, 25));
        v.prev_cooperation_count = static_cast<int>(costar::uniform_below(rng, 12));
        v.prev_cross_region = costar::uniform_below(rng, 2) == 1;
    }
    return nodes;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("costar_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << text;
}

}  // namespace testing
