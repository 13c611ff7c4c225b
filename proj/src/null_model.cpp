#include "costar/null_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "costar/error.hpp"
#include "costar/parallel.hpp"

namespace costar {

void SwapConfig::validate() const {
    if (!(swap_multiplier > 0.0) || !std::isfinite(swap_multiplier)) {
        throw ConfigError("swap multiplier must be a positive number");
    }
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
}

SwapGraph::SwapGraph(const CollabNetwork& g) {
    edges_.reserve(g.edge_count());
    index_.reserve(g.edge_count() * 2);
    for (const auto& e : g.edges()) {
        edges_.push_back(e.edge);
        index_.insert(key(e.edge.u, e.edge.v));
    }
}

std::uint64_t SwapGraph::key(NodeId a, NodeId b) {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
}

bool SwapGraph::has_edge(NodeId a, NodeId b) const { return index_.contains(key(a, b)); }

bool SwapGraph::try_swap(std::size_t i, std::size_t j, bool flip) {
    const NodeId a = edges_[i].u, b = edges_[i].v;
    NodeId c = edges_[j].u, d = edges_[j].v;
    if (flip) std::swap(c, d);
    if (a == c || a == d || b == c || b == d) return false;
    if (has_edge(a, c) || has_edge(b, d)) return false;
    index_.erase(key(a, b));
    index_.erase(key(c, d));
    index_.insert(key(a, c));
    index_.insert(key(b, d));
    edges_[i] = Edge::normalized(a, c);
    edges_[j] = Edge::normalized(b, d);
    return true;
}

CollabNetwork SwapGraph::to_network(const CollabNetwork& base) const {
    return base.with_edge_set(edges_);
}

bool double_edge_swap(SwapGraph& g, Rng& rng) {
    const auto m = g.edge_count();
    if (m < 2) return false;
    const auto i = uniform_below(rng, m);
    auto j = uniform_below(rng, m - 1);
    if (j >= i) ++j;
    // Random orientation of the second edge reaches both rewirings.
    const bool flip = (rng() & 1u) != 0;
    return g.try_swap(i, j, flip);
}

CollabNetwork randomize(const CollabNetwork& g, const SwapConfig& cfg, Rng& rng) {
    cfg.validate();
    SwapGraph work(g);
    const auto target = static_cast<std::size_t>(
        std::ceil(cfg.swap_multiplier * static_cast<double>(g.edge_count())));
    if (work.edge_count() >= 2) {
        if (cfg.count_successful_only) {
            const std::size_t cap = target * 100;
            std::size_t done = 0;
            for (std::size_t attempt = 0; attempt < cap && done < target; ++attempt) {
                if (double_edge_swap(work, rng)) ++done;
            }
        } else {
            for (std::size_t attempt = 0; attempt < target; ++attempt) {
                double_edge_swap(work, rng);
            }
        }
    }
    return work.to_network(g);
}

std::size_t cross_region_observed(const CollabNetwork& g, Region r1, Region r2) {
    std::size_t count = 0;
    for (const auto& e : g.edges()) {
        const auto ru = g.attributes(e.edge.u).region;
        const auto rv = g.attributes(e.edge.v).region;
        if ((ru == r1 && rv == r2) || (ru == r2 && rv == r1)) ++count;
    }
    return count;
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || values[lo] == values[hi]) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
}

IndexResult cross_region_index(const CollabNetwork& g, Region r1, Region r2,
                               const SwapConfig& cfg) {
    cfg.validate();
    const auto& label = g.period().label;
    if (r1 == r2) throw PreconditionError("cross-region index needs two distinct regions");
    bool has1 = false, has2 = false;
    for (const auto& node : g.nodes()) {
        has1 = has1 || node.region == r1;
        has2 = has2 || node.region == r2;
    }
    if (!has1 || !has2) {
        throw PreconditionError("period '" + label + "' lacks stars from " +
                                std::string(has1 ? to_string(r2) : to_string(r1)));
    }

    IndexResult out;
    out.period = label;
    out.observed = cross_region_observed(g, r1, r2);
    out.replicates = cfg.replicates;
    out.replicate_counts.assign(cfg.replicates, 0);
    parallel_for(cfg.replicates, cfg.workers, [&](std::size_t r) {
        auto rng = make_rng(cfg.seed, r);
        out.replicate_counts[r] = cross_region_observed(randomize(g, cfg, rng), r1, r2);
    });

    double total = 0.0;
    for (auto c : out.replicate_counts) total += static_cast<double>(c);
    out.expected = total / static_cast<double>(cfg.replicates);
    if (out.expected <= 0.0) {
        throw DegenerateNullError("period '" + label +
                                  "': null expectation of cross-region edges is zero");
    }
    out.ratio = static_cast<double>(out.observed) / out.expected;

    std::vector<double> ratios;
    ratios.reserve(cfg.replicates);
    for (auto c : out.replicate_counts) {
        if (out.observed == 0) {
            ratios.push_back(0.0);
        } else if (c == 0) {
            ratios.push_back(std::numeric_limits<double>::infinity());
        } else {
            ratios.push_back(static_cast<double>(out.observed) / static_cast<double>(c));
        }
    }
    out.ci_low = percentile(ratios, 0.025);
    out.ci_high = percentile(ratios, 0.975);
    return out;
}

}  // namespace costar
