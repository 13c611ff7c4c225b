#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "costar/graph.hpp"
#include "costar/rng.hpp"

namespace costar::ergm {

// Node attributes visible to model terms.
//   categorical: region, age_group, cohort, prev_cross_region
//   numeric:     prev_cooperation_count, first_work_year, birth_year, age,
//                prev_cross_region (0/1)
// age_group and age are evaluated at the network's period midpoint.
std::vector<std::string> categorical_attributes();
std::vector<std::string> numeric_attributes();

// Distinct levels of a categorical attribute among g's nodes, in canonical
// order (region enum order, age groups youngest first, cohorts oldest first).
std::vector<std::string> attribute_levels(std::span<const NodeAttributes> nodes,
                                          const PeriodSpec& period, const std::string& attribute);

enum class TermKind { Edges, NodeFactor, NodeCov, NodeMatch };

// One model column. All kinds are dyad independent.
struct TermSpec {
    TermKind kind = TermKind::Edges;
    std::string attribute;
    // NodeFactor only: the level this column indicates, and the reference
    // level it is contrasted with (informational, may be empty).
    std::string level;
    std::string reference;

    static TermSpec edges() { return {TermKind::Edges, {}, {}, {}}; }
    static TermSpec node_factor(std::string attribute, std::string level,
                                std::string reference = {}) {
        return {TermKind::NodeFactor, std::move(attribute), std::move(level), std::move(reference)};
    }
    static TermSpec node_cov(std::string attribute) {
        return {TermKind::NodeCov, std::move(attribute), {}, {}};
    }
    static TermSpec node_match(std::string attribute) {
        return {TermKind::NodeMatch, std::move(attribute), {}, {}};
    }

    // "edges", "nodefactor.region.HongKong", "nodecov.prev_cooperation_count",
    // "nodematch.region".
    std::string name() const;

    friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

// A term as written in a term-list file. A NodeFactor without `level`
// expands, per network, to one column for every level present except
// `reference`.
struct TermRequest {
    TermKind kind = TermKind::Edges;
    std::string attribute;
    std::optional<std::string> level;
    std::optional<std::string> reference;
};

// Edges; age-group dummies (reference under20, unknown kept as a level);
// career-entry cohort dummies (reference before1980); region dummy
// (reference Mainland); lagged popularity covariate; lagged cross-region
// dummy (reference false); regional homophily.
std::vector<TermRequest> default_term_requests();

// Parses a JSON array of {"type": "edges"|"nodefactor"|"nodecov"|"nodematch",
// "attribute": ..., "level": ..., "reference": ...}. Throws SpecificationError.
std::vector<TermRequest> parse_term_requests(const nlohmann::json& doc);
nlohmann::json to_json(const std::vector<TermRequest>& requests);

// Expands requests against the nodes of one network. Throws
// SpecificationError for unknown attributes or levels, or a NodeFactor level
// equal to its reference.
std::vector<TermSpec> resolve_terms(std::span<const NodeAttributes> nodes,
                                    const PeriodSpec& period,
                                    std::span<const TermRequest> requests);

// Per-node term inputs, resolved once. Change statistics of a dyad are a
// function of its two endpoints only.
class DyadModel {
public:
    DyadModel(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
              std::vector<TermSpec> terms);
    DyadModel(const CollabNetwork& g, std::vector<TermSpec> terms)
        : DyadModel(g.nodes(), g.period(), std::move(terms)) {}

    std::size_t node_count() const { return node_count_; }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<TermSpec>& terms() const { return terms_; }
    std::vector<std::string> term_names() const;

    // Writes term_count() entries.
    void change(NodeId i, NodeId j, std::span<double> out) const;
    std::vector<double> change(NodeId i, NodeId j) const;
    // theta . change(i, j)
    double linear_predictor(NodeId i, NodeId j, std::span<const double> theta) const;

    // Per-node indicator (NodeFactor) or covariate (NodeCov) of term t.
    std::span<const double> node_values(std::size_t t) const { return columns_[t].value; }
    // Per-node category code of a NodeMatch term t.
    std::span<const int> node_codes(std::size_t t) const { return columns_[t].code; }

private:
    struct Column {
        TermKind kind;
        std::vector<double> value;  // indicator (NodeFactor) or covariate (NodeCov)
        std::vector<int> code;      // category code (NodeMatch)
    };
    std::size_t node_count_ = 0;
    std::vector<TermSpec> terms_;
    std::vector<Column> columns_;
};

// g(y, X): one entry per term, computed from node degrees and the edge list.
std::vector<double> compute_statistics(const CollabNetwork& g, const std::vector<TermSpec>& terms);

// compute_statistics(g + ij) - compute_statistics(g - ij), without copying g.
std::vector<double> change_statistics(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                                      NodeId i, NodeId j);

// Dyads in lexicographic (i < j) order.
std::size_t dyad_count(std::size_t n);
std::size_t dyad_index(std::size_t n, NodeId i, NodeId j);
Edge dyad_at(std::size_t n, std::size_t index);

struct DyadRow {
    NodeId i;
    NodeId j;
    bool response = false;
    std::vector<double> covariates;
};

inline constexpr std::size_t kDefaultDyadCap = 50'000'000;

// One row per dyad, lexicographic. Throws SizeGuardError above `dyad_cap`.
std::vector<DyadRow> build_design(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                                  std::size_t dyad_cap = kDefaultDyadCap);

struct ErgmFit {
    std::vector<std::string> terms;
    std::vector<double> theta;
    std::vector<double> se;
    double log_likelihood = 0.0;
    double null_deviance = 0.0;
    double residual_deviance = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::size_t k = 0;
    std::size_t n_dyads = 0;
    std::size_t n_edges = 0;
    bool converged = false;
    int iterations = 0;

    std::optional<std::size_t> term_index(const std::string& name) const;
};

struct InformationCriteria {
    double aic;
    double bic;
};

// aic = deviance + 2k, bic = deviance + k ln(n_dyads).
InformationCriteria information_criteria(double residual_deviance, std::size_t k,
                                         std::size_t n_dyads);

// Overrides the parameter count used for AIC/BIC and recomputes both.
void force_parameter_count(ErgmFit& fit, std::size_t k);

struct FitOptions {
    int max_iterations = 50;
    double score_tolerance = 1e-8;
    double relative_loglik_tolerance = 1e-10;
    // |theta| beyond this during iteration is reported as separation.
    double divergence_bound = 30.0;
    unsigned workers = 1;
};

// Maximum likelihood for a dyad-independent model: logistic regression of the
// dyad responses on change statistics, solved by Newton-Raphson (IRLS) with
// step halving. Standard errors come from the inverse observed information.
// Null deviance is that of the all-zero model (p = 1/2 per dyad).
//
// Throws RankDeficiencyError naming collinear columns, SeparationError naming
// a column that perfectly predicts the response. Non-convergence within
// max_iterations is returned with converged = false.
ErgmFit fit(const CollabNetwork& g, const std::vector<TermSpec>& terms, const FitOptions& options = {});

// Sum over dyads of log P(y_ij | theta) under the logistic factorization.
double log_likelihood(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                      std::span<const double> theta);

nlohmann::json to_json(const ErgmFit& fit);
ErgmFit fit_from_json(const nlohmann::json& doc);

// Metropolis chain over graphs on a fixed node set: each step proposes
// toggling a uniformly random dyad and accepts with min(1, exp(s theta.delta)),
// s = +1 for an addition and -1 for a removal. Starts from the empty graph.
class DyadChain {
public:
    DyadChain(const DyadModel& model, std::span<const double> theta, Rng rng);

    void step();
    void run(std::size_t steps);

    std::size_t steps() const { return steps_; }
    std::size_t accepted() const { return accepted_; }
    std::size_t edge_count() const { return edges_; }
    bool present(std::size_t dyad) const { return state_[dyad] != 0; }
    // Bit d set when dyad d is present. Requires at most 64 dyads.
    std::uint64_t mask() const;
    std::vector<Edge> edges() const;

private:
    std::size_t n_;
    std::vector<double> eta_;
    std::vector<std::uint8_t> state_;
    Rng rng_;
    std::size_t steps_ = 0;
    std::size_t accepted_ = 0;
    std::size_t edges_ = 0;
};

struct SimulationOptions {
    std::size_t burn_in = 10'000;
    std::size_t samples = 100;
    // Proposals between retained samples.
    std::size_t thinning = 1;
};

// Networks drawn from P(Y = y) = exp(theta . g(y)) / k(theta) on the given
// nodes. Throws SpecificationError when theta and terms differ in length.
std::vector<CollabNetwork> simulate(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
                                    const std::vector<TermSpec>& terms,
                                    std::span<const double> theta,
                                    const SimulationOptions& options, Rng& rng);

// Exact draw for a dyad-independent model: each dyad independently with
// probability logistic(theta . delta_ij).
CollabNetwork sample_independent(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
                                 const std::vector<TermSpec>& terms,
                                 std::span<const double> theta, Rng& rng);

inline constexpr std::size_t kOracleMaxNodes = 6;

// Exact ERGM distribution by enumerating all 2^C(n,2) graphs on n <= 6 nodes.
class NormalizerOracle {
public:
    // Throws SizeGuardError for more than six nodes.
    NormalizerOracle(std::vector<NodeAttributes> nodes, PeriodSpec period,
                     std::vector<TermSpec> terms, std::vector<double> theta);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t graph_count() const { return std::size_t{1} << dyad_count(nodes_.size()); }
    // Graph whose edge set is the dyads whose bits are set in `mask`.
    CollabNetwork graph(std::uint64_t mask) const;
    // ln k(theta)
    double log_normalizer() const { return log_normalizer_; }
    // exp(theta . g(y)) / k(theta)
    double probability(const CollabNetwork& g) const;
    // Indexed by mask.
    const std::vector<double>& distribution() const { return probabilities_; }

private:
    std::vector<NodeAttributes> nodes_;
    PeriodSpec period_;
    std::vector<TermSpec> terms_;
    std::vector<double> theta_;
    std::vector<double> probabilities_;
    double log_normalizer_ = 0.0;
};

std::vector<double> oracle_distribution(const NormalizerOracle& oracle);

}  // namespace costar::ergm
