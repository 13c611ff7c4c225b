#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "costar/graph.hpp"
#include "costar/rng.hpp"

namespace costar {

struct SwapConfig {
    // Attempts per edge: ceil(swap_multiplier * |E|) swaps are performed.
    double swap_multiplier = 2.0;
    std::size_t replicates = 100;
    std::uint64_t seed = 0;
    // Count only successful swaps toward the target. Attempts are then capped
    // at 100x the target so graphs with no legal swap still terminate.
    bool count_successful_only = false;
    unsigned workers = 1;

    // Throws ConfigError on a non-positive multiplier or zero replicates.
    void validate() const;
};

// Edge list plus membership index, rewired in place by double_edge_swap.
class SwapGraph {
public:
    explicit SwapGraph(const CollabNetwork& g);

    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(NodeId a, NodeId b) const;

    // Replaces edges i and j, assumed distinct, by (a,c),(b,d) where
    // i = (a,b), j = (c,d) in stored orientation; `flip` reads j as (d,c).
    // Returns false, leaving the graph unchanged, when the edges share a node
    // or a new edge already exists.
    bool try_swap(std::size_t i, std::size_t j, bool flip = false);

    // Same nodes and attributes as `base`, current edge set, weights 1.
    CollabNetwork to_network(const CollabNetwork& base) const;

private:
    static std::uint64_t key(NodeId a, NodeId b);

    std::vector<Edge> edges_;
    std::unordered_set<std::uint64_t> index_;
};

// One attempt: two distinct edges chosen uniformly, the second with a random
// orientation, then SwapGraph::try_swap. Graphs with fewer than two edges
// always reject.
bool double_edge_swap(SwapGraph& g, Rng& rng);

// Degree-preserving randomization of a copy of g. Node attributes are kept;
// rewired edges carry weight 1.
CollabNetwork randomize(const CollabNetwork& g, const SwapConfig& cfg, Rng& rng);

// Edges with one endpoint in r1 and the other in r2.
std::size_t cross_region_observed(const CollabNetwork& g, Region r1, Region r2);

struct IndexResult {
    std::string period;
    std::size_t observed = 0;
    double expected = 0.0;
    double ratio = 0.0;
    // 2.5 and 97.5 percentiles of observed / replicate_count.
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t replicates = 0;
    // Cross-region count of each randomized replicate, in replicate order.
    std::vector<std::size_t> replicate_counts;
};

// Observed cross-region edge count divided by its mean over `replicates`
// randomized copies. Replicate r draws from make_rng(cfg.seed, r), so the
// result is independent of cfg.workers.
//
// Throws PreconditionError when r1 == r2 or either region has no node, and
// DegenerateNullError when the null expectation is zero.
IndexResult cross_region_index(const CollabNetwork& g, Region r1, Region r2,
                               const SwapConfig& cfg);

// Linear-interpolation percentile (q in [0, 1]) of unsorted values.
double percentile(std::vector<double> values, double q);

}  // namespace costar
