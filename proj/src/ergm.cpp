#include "costar/ergm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "costar/error.hpp"
#include "costar/ingest.hpp"
#include "costar/parallel.hpp"

namespace costar::ergm {

namespace {

const std::vector<std::string> kAgeLevels = {"under20", "20-39", "40-59", "over60", "unknown"};

bool is_categorical(const std::string& a) {
    return a == "region" || a == "age_group" || a == "cohort" || a == "prev_cross_region";
}

bool is_numeric(const std::string& a) {
    return a == "prev_cooperation_count" || a == "first_work_year" || a == "birth_year" ||
           a == "age" || a == "prev_cross_region";
}

std::string categorical_value(const NodeAttributes& node, const PeriodSpec& period,
                              const std::string& attribute) {
    if (attribute == "region") return std::string(to_string(node.region));
    if (attribute == "age_group") return age_group(node, period);
    if (attribute == "cohort") return entry_cohort(node.first_work_year);
    if (attribute == "prev_cross_region") return node.prev_cross_region ? "true" : "false";
    throw SpecificationError("unknown categorical attribute '" + attribute + "'");
}

double numeric_value(const NodeAttributes& node, const PeriodSpec& period,
                     const std::string& attribute, std::size_t index) {
    if (attribute == "prev_cooperation_count") return node.prev_cooperation_count;
    if (attribute == "first_work_year") return node.first_work_year;
    if (attribute == "prev_cross_region") return node.prev_cross_region ? 1.0 : 0.0;
    if (attribute == "birth_year" || attribute == "age") {
        if (!node.birth_year) {
            throw SpecificationError("attribute '" + attribute + "' is missing for node " +
                                     std::to_string(index));
        }
        return attribute == "age" ? period.midpoint_year() - *node.birth_year : *node.birth_year;
    }
    throw SpecificationError("unknown numeric attribute '" + attribute + "'");
}

// Sort key for canonical level order.
double level_rank(const std::string& attribute, const std::string& level) {
    if (attribute == "region") {
        auto r = parse_region(level);
        return r ? static_cast<double>(*r) : 99.0;
    }
    if (attribute == "age_group") {
        auto it = std::find(kAgeLevels.begin(), kAgeLevels.end(), level);
        return static_cast<double>(it - kAgeLevels.begin());
    }
    if (attribute == "cohort") {
        if (level == "before1980") return 0.0;
        return std::atof(level.c_str());
    }
    if (attribute == "prev_cross_region") return level == "true" ? 1.0 : 0.0;
    return 0.0;
}

bool valid_level(const std::string& attribute, const std::string& level) {
    if (attribute == "region") return parse_region(level).has_value();
    if (attribute == "age_group") {
        return std::find(kAgeLevels.begin(), kAgeLevels.end(), level) != kAgeLevels.end();
    }
    if (attribute == "prev_cross_region") return level == "true" || level == "false";
    if (attribute == "cohort") {
        if (level == "before1980") return true;
        if (level.size() != 9 || level[4] != '-') return false;
        const int start = std::atoi(level.substr(0, 4).c_str());
        return start >= 1980 && (start - 1980) % 5 == 0 && entry_cohort(start) == level;
    }
    return false;
}

std::string kind_name(TermKind kind) {
    switch (kind) {
        case TermKind::Edges: return "edges";
        case TermKind::NodeFactor: return "nodefactor";
        case TermKind::NodeCov: return "nodecov";
        case TermKind::NodeMatch: return "nodematch";
    }
    return "edges";
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::vector<std::string> categorical_attributes() {
    return {"region", "age_group", "cohort", "prev_cross_region"};
}

std::vector<std::string> numeric_attributes() {
    return {"prev_cooperation_count", "first_work_year", "birth_year", "age", "prev_cross_region"};
}

std::vector<std::string> attribute_levels(std::span<const NodeAttributes> nodes,
                                          const PeriodSpec& period, const std::string& attribute) {
    if (!is_categorical(attribute)) {
        throw SpecificationError("'" + attribute + "' is not a categorical attribute");
    }
    std::vector<std::string> levels;
    for (const auto& node : nodes) {
        auto v = categorical_value(node, period, attribute);
        if (std::find(levels.begin(), levels.end(), v) == levels.end()) levels.push_back(v);
    }
    std::stable_sort(levels.begin(), levels.end(), [&](const auto& a, const auto& b) {
        return level_rank(attribute, a) < level_rank(attribute, b);
    });
    return levels;
}

std::string TermSpec::name() const {
    switch (kind) {
        case TermKind::Edges: return "edges";
        case TermKind::NodeFactor: return "nodefactor." + attribute + "." + level;
        case TermKind::NodeCov: return "nodecov." + attribute;
        case TermKind::NodeMatch: return "nodematch." + attribute;
    }
    return {};
}

std::vector<TermRequest> default_term_requests() {
    return {
        {TermKind::Edges, {}, std::nullopt, std::nullopt},
        {TermKind::NodeFactor, "age_group", std::nullopt, "under20"},
        {TermKind::NodeFactor, "cohort", std::nullopt, "before1980"},
        {TermKind::NodeFactor, "region", std::nullopt, "Mainland"},
        {TermKind::NodeCov, "prev_cooperation_count", std::nullopt, std::nullopt},
        {TermKind::NodeFactor, "prev_cross_region", std::nullopt, "false"},
        {TermKind::NodeMatch, "region", std::nullopt, std::nullopt},
    };
}

std::vector<TermRequest> parse_term_requests(const nlohmann::json& doc) {
    if (!doc.is_array()) throw SpecificationError("term list must be a JSON array");
    std::vector<TermRequest> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("type") || !item["type"].is_string()) {
            throw SpecificationError("each term needs a string \"type\"");
        }
        const auto type = item["type"].get<std::string>();
        TermRequest req;
        if (type == "edges") {
            req.kind = TermKind::Edges;
        } else if (type == "nodefactor") {
            req.kind = TermKind::NodeFactor;
        } else if (type == "nodecov") {
            req.kind = TermKind::NodeCov;
        } else if (type == "nodematch") {
            req.kind = TermKind::NodeMatch;
        } else {
            throw SpecificationError("unknown term type '" + type + "'");
        }
        auto get_string = [&](const char* key) -> std::optional<std::string> {
            if (!item.contains(key)) return std::nullopt;
            if (!item[key].is_string()) {
                throw SpecificationError(std::string("term field \"") + key + "\" must be a string");
            }
            return item[key].get<std::string>();
        };
        if (req.kind != TermKind::Edges) {
            auto attr = get_string("attribute");
            if (!attr) throw SpecificationError("term '" + type + "' needs an \"attribute\"");
            req.attribute = *attr;
        }
        req.level = get_string("level");
        req.reference = get_string("reference");
        out.push_back(std::move(req));
    }
    return out;
}

nlohmann::json to_json(const std::vector<TermRequest>& requests) {
    auto out = nlohmann::json::array();
    for (const auto& r : requests) {
        nlohmann::json item = {{"type", kind_name(r.kind)}};
        if (r.kind != TermKind::Edges) item["attribute"] = r.attribute;
        if (r.level) item["level"] = *r.level;
        if (r.reference) item["reference"] = *r.reference;
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<TermSpec> resolve_terms(std::span<const NodeAttributes> nodes,
                                    const PeriodSpec& period,
                                    std::span<const TermRequest> requests) {
    std::vector<TermSpec> out;
    for (const auto& req : requests) {
        switch (req.kind) {
            case TermKind::Edges:
                out.push_back(TermSpec::edges());
                break;
            case TermKind::NodeCov:
                if (!is_numeric(req.attribute)) {
                    throw SpecificationError("nodecov: unknown numeric attribute '" +
                                             req.attribute + "'");
                }
                out.push_back(TermSpec::node_cov(req.attribute));
                break;
            case TermKind::NodeMatch:
                if (!is_categorical(req.attribute) && !is_numeric(req.attribute)) {
                    throw SpecificationError("nodematch: unknown attribute '" + req.attribute +
                                             "'");
                }
                out.push_back(TermSpec::node_match(req.attribute));
                break;
            case TermKind::NodeFactor: {
                if (!is_categorical(req.attribute)) {
                    throw SpecificationError("nodefactor: unknown categorical attribute '" +
                                             req.attribute + "'");
                }
                const auto reference = req.reference.value_or("");
                if (req.reference && !valid_level(req.attribute, reference)) {
                    throw SpecificationError("nodefactor: unknown reference level '" + reference +
                                             "' for '" + req.attribute + "'");
                }
                if (req.level) {
                    if (!valid_level(req.attribute, *req.level)) {
                        throw SpecificationError("nodefactor: unknown level '" + *req.level +
                                                 "' for '" + req.attribute + "'");
                    }
                    if (*req.level == reference) {
                        throw SpecificationError("nodefactor: level '" + *req.level +
                                                 "' is the reference level");
                    }
                    out.push_back(TermSpec::node_factor(req.attribute, *req.level, reference));
                    break;
                }
                for (const auto& level : attribute_levels(nodes, period, req.attribute)) {
                    if (level == reference) continue;
                    out.push_back(TermSpec::node_factor(req.attribute, level, reference));
                }
                break;
            }
        }
    }
    return out;
}

DyadModel::DyadModel(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
                     std::vector<TermSpec> terms)
    : node_count_(nodes.size()), terms_(std::move(terms)) {
    columns_.reserve(terms_.size());
    for (const auto& term : terms_) {
        Column col{term.kind, {}, {}};
        switch (term.kind) {
            case TermKind::Edges:
                break;
            case TermKind::NodeFactor: {
                if (!is_categorical(term.attribute)) {
                    throw SpecificationError("nodefactor: unknown categorical attribute '" +
                                             term.attribute + "'");
                }
                if (!valid_level(term.attribute, term.level)) {
                    throw SpecificationError("nodefactor: unknown level '" + term.level +
                                             "' for '" + term.attribute + "'");
                }
                col.value.reserve(nodes.size());
                for (const auto& node : nodes) {
                    col.value.push_back(
                        categorical_value(node, period, term.attribute) == term.level ? 1.0 : 0.0);
                }
                break;
            }
            case TermKind::NodeCov:
                if (!is_numeric(term.attribute)) {
                    throw SpecificationError("nodecov: unknown numeric attribute '" +
                                             term.attribute + "'");
                }
                col.value.reserve(nodes.size());
                for (std::size_t v = 0; v < nodes.size(); ++v) {
                    col.value.push_back(numeric_value(nodes[v], period, term.attribute, v));
                }
                break;
            case TermKind::NodeMatch: {
                std::map<std::string, int> codes;
                col.code.reserve(nodes.size());
                for (std::size_t v = 0; v < nodes.size(); ++v) {
                    std::string key;
                    if (is_categorical(term.attribute)) {
                        key = categorical_value(nodes[v], period, term.attribute);
                    } else if (is_numeric(term.attribute)) {
                        key = std::to_string(numeric_value(nodes[v], period, term.attribute, v));
                    } else {
                        throw SpecificationError("nodematch: unknown attribute '" +
                                                 term.attribute + "'");
                    }
                    auto [it, _] = codes.emplace(key, static_cast<int>(codes.size()));
                    col.code.push_back(it->second);
                }
                break;
            }
        }
        columns_.push_back(std::move(col));
    }
}

std::vector<std::string> DyadModel::term_names() const {
    std::vector<std::string> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.name());
    return out;
}

void DyadModel::change(NodeId i, NodeId j, std::span<double> out) const {
    for (std::size_t t = 0; t < columns_.size(); ++t) {
        const auto& col = columns_[t];
        switch (col.kind) {
            case TermKind::Edges:
                out[t] = 1.0;
                break;
            case TermKind::NodeFactor:
            case TermKind::NodeCov:
                out[t] = col.value[i.value] + col.value[j.value];
                break;
            case TermKind::NodeMatch:
                out[t] = col.code[i.value] == col.code[j.value] ? 1.0 : 0.0;
                break;
        }
    }
}

std::vector<double> DyadModel::change(NodeId i, NodeId j) const {
    std::vector<double> out(columns_.size());
    change(i, j, out);
    return out;
}

double DyadModel::linear_predictor(NodeId i, NodeId j, std::span<const double> theta) const {
    double eta = 0.0;
    for (std::size_t t = 0; t < columns_.size(); ++t) {
        const auto& col = columns_[t];
        switch (col.kind) {
            case TermKind::Edges:
                eta += theta[t];
                break;
            case TermKind::NodeFactor:
            case TermKind::NodeCov:
                eta += theta[t] * (col.value[i.value] + col.value[j.value]);
                break;
            case TermKind::NodeMatch:
                if (col.code[i.value] == col.code[j.value]) eta += theta[t];
                break;
        }
    }
    return eta;
}

std::vector<double> compute_statistics(const CollabNetwork& g, const std::vector<TermSpec>& terms) {
    const DyadModel model(g, terms);
    const auto degrees = degree_sequence(g);
    std::vector<double> out(terms.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        switch (terms[t].kind) {
            case TermKind::Edges:
                out[t] = static_cast<double>(g.edge_count());
                break;
            case TermKind::NodeFactor:
            case TermKind::NodeCov: {
                // each edge contributes once per endpoint
                const auto values = model.node_values(t);
                for (std::size_t v = 0; v < degrees.size(); ++v) {
                    out[t] += values[v] * static_cast<double>(degrees[v]);
                }
                break;
            }
            case TermKind::NodeMatch: {
                const auto codes = model.node_codes(t);
                for (const auto& e : g.edges()) {
                    if (codes[e.edge.u.value] == codes[e.edge.v.value]) out[t] += 1.0;
                }
                break;
            }
        }
    }
    return out;
}

std::vector<double> change_statistics(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                                      NodeId i, NodeId j) {
    if (i == j) throw PreconditionError("change statistics need two distinct nodes");
    if (i.value >= g.node_count() || j.value >= g.node_count()) {
        throw PreconditionError("change statistics: node out of range");
    }
    return DyadModel(g, terms).change(i, j);
}

std::size_t dyad_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

std::size_t dyad_index(std::size_t n, NodeId i, NodeId j) {
    auto [a, b] = std::minmax(i.value, j.value);
    // rows 0..a-1 hold (n-1) + (n-2) + ... + (n-a) dyads
    const std::size_t before = static_cast<std::size_t>(a) * (2 * n - a - 1) / 2;
    return before + (b - a - 1);
}

Edge dyad_at(std::size_t n, std::size_t index) {
    std::uint32_t i = 0;
    std::size_t remaining = index;
    while (remaining >= n - 1 - i) {
        remaining -= n - 1 - i;
        ++i;
    }
    return {NodeId{i}, NodeId{static_cast<std::uint32_t>(i + 1 + remaining)}};
}

std::vector<DyadRow> build_design(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                                  std::size_t dyad_cap) {
    const auto n = g.node_count();
    const auto total = dyad_count(n);
    if (total > dyad_cap) {
        throw SizeGuardError("design matrix would hold " + std::to_string(total) +
                             " dyads (cap " + std::to_string(dyad_cap) + ")");
    }
    const DyadModel model(g, terms);
    std::vector<DyadRow> rows;
    rows.reserve(total);
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            DyadRow row{NodeId{i}, NodeId{j}, g.has_edge(NodeId{i}, NodeId{j}),
                        model.change(NodeId{i}, NodeId{j})};
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::optional<std::size_t> ErgmFit::term_index(const std::string& name) const {
    auto it = std::find(terms.begin(), terms.end(), name);
    if (it == terms.end()) return std::nullopt;
    return static_cast<std::size_t>(it - terms.begin());
}

InformationCriteria information_criteria(double residual_deviance, std::size_t k,
                                         std::size_t n_dyads) {
    const double kk = static_cast<double>(k);
    return {residual_deviance + 2.0 * kk,
            residual_deviance + kk * std::log(static_cast<double>(n_dyads))};
}

void force_parameter_count(ErgmFit& fit, std::size_t k) {
    fit.k = k;
    const auto ic = information_criteria(fit.residual_deviance, k, fit.n_dyads);
    fit.aic = ic.aic;
    fit.bic = ic.bic;
}

namespace {

constexpr std::uint32_t kRowsPerBlock = 16;

// Visits every dyad (i < j) of rows [row_begin, row_end) with its response.
template <typename Visit>
void for_each_dyad(const CollabNetwork& g, std::uint32_t row_begin, std::uint32_t row_end,
                   Visit&& visit) {
    const auto n = static_cast<std::uint32_t>(g.node_count());
    for (std::uint32_t i = row_begin; i < row_end; ++i) {
        auto nb = g.neighbors(NodeId{i});
        auto it = std::upper_bound(nb.begin(), nb.end(), NodeId{i});
        for (std::uint32_t j = i + 1; j < n; ++j) {
            bool y = false;
            if (it != nb.end() && it->value == j) {
                y = true;
                ++it;
            }
            visit(NodeId{i}, NodeId{j}, y);
        }
    }
}

// Runs `block_fn(row_begin, row_end, slot)` over fixed row blocks and returns
// the per-block results in block order.
template <typename Result, typename BlockFn>
std::vector<Result> over_blocks(const CollabNetwork& g, unsigned workers, BlockFn&& block_fn) {
    const auto n = static_cast<std::uint32_t>(g.node_count());
    const std::size_t blocks = (n + kRowsPerBlock - 1) / kRowsPerBlock;
    std::vector<Result> out(blocks);
    parallel_for(blocks, workers, [&](std::size_t b) {
        const auto begin = static_cast<std::uint32_t>(b * kRowsPerBlock);
        const auto end = std::min<std::uint32_t>(n, begin + kRowsPerBlock);
        out[b] = block_fn(begin, end);
    });
    return out;
}

struct ScanBlock {
    Eigen::MatrixXd gram;
    std::vector<double> min1, max1, min0, max0;
    std::size_t ones = 0, zeros = 0;
};

struct Moments {
    double loglik = 0.0;
    Eigen::VectorXd score;
    Eigen::MatrixXd info;
};

Moments accumulate(const CollabNetwork& g, const DyadModel& model, const Eigen::VectorXd& theta,
                   unsigned workers) {
    const auto k = static_cast<Eigen::Index>(model.term_count());
    auto blocks = over_blocks<Moments>(g, workers, [&](std::uint32_t begin, std::uint32_t end) {
        Moments m{0.0, Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, k)};
        Eigen::VectorXd x(k);
        for_each_dyad(g, begin, end, [&](NodeId i, NodeId j, bool y) {
            model.change(i, j, std::span<double>(x.data(), static_cast<std::size_t>(k)));
            const double eta = x.dot(theta);
            const double p = logistic(eta);
            m.loglik -= y ? softplus(-eta) : softplus(eta);
            m.score.noalias() += ((y ? 1.0 : 0.0) - p) * x;
            m.info.selfadjointView<Eigen::Upper>().rankUpdate(x, p * (1.0 - p));
        });
        return m;
    });
    Moments total{0.0, Eigen::VectorXd::Zero(k), Eigen::MatrixXd::Zero(k, k)};
    for (const auto& b : blocks) {
        total.loglik += b.loglik;
        total.score += b.score;
        total.info += b.info;
    }
    total.info = total.info.selfadjointView<Eigen::Upper>();
    return total;
}

void check_rank(const Eigen::MatrixXd& gram, const std::vector<std::string>& names) {
    const auto k = gram.rows();
    for (Eigen::Index c = 0; c < k; ++c) {
        if (gram(c, c) <= 0.0) {
            throw RankDeficiencyError("column '" + names[static_cast<std::size_t>(c)] +
                                      "' is identically zero");
        }
    }
    const Eigen::VectorXd scale = gram.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd corr = scale.asDiagonal() * gram * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
    const double largest = eig.eigenvalues().maxCoeff();
    std::vector<std::string> involved;
    for (Eigen::Index e = 0; e < k; ++e) {
        if (eig.eigenvalues()(e) > 1e-10 * largest) continue;
        for (Eigen::Index c = 0; c < k; ++c) {
            const auto& name = names[static_cast<std::size_t>(c)];
            if (std::abs(eig.eigenvectors()(c, e)) > 1e-3 &&
                std::find(involved.begin(), involved.end(), name) == involved.end()) {
                involved.push_back(name);
            }
        }
    }
    if (!involved.empty()) {
        std::string list;
        for (const auto& n : involved) list += (list.empty() ? "" : ", ") + n;
        throw RankDeficiencyError("design matrix is rank deficient; collinear columns: " + list);
    }
}

void check_separation(const DyadModel& model, const ScanBlock& scan,
                      const std::vector<std::string>& names) {
    if (scan.ones == 0 || scan.zeros == 0) {
        throw SeparationError("edges", scan.ones == 0 ? "network has no edges; the edges term diverges"
                                                      : "network is complete; the edges term diverges");
    }
    const bool has_intercept = std::any_of(model.terms().begin(), model.terms().end(),
                                           [](const TermSpec& t) { return t.kind == TermKind::Edges; });
    if (!has_intercept) return;
    for (std::size_t c = 0; c < names.size(); ++c) {
        const double lo = std::min(scan.min1[c], scan.min0[c]);
        const double hi = std::max(scan.max1[c], scan.max0[c]);
        if (lo == hi) continue;
        if (scan.max1[c] <= scan.min0[c] || scan.max0[c] <= scan.min1[c]) {
            throw SeparationError(names[c], "term '" + names[c] +
                                                "' separates present from absent dyads; its "
                                                "coefficient has no finite estimate");
        }
    }
}

}  // namespace

ErgmFit fit(const CollabNetwork& g, const std::vector<TermSpec>& terms, const FitOptions& options) {
    if (terms.empty()) throw SpecificationError("model has no terms");
    const DyadModel model(g, terms);
    const auto names = model.term_names();
    const auto k = static_cast<Eigen::Index>(terms.size());
    const auto kk = terms.size();
    const auto n_dyads = dyad_count(g.node_count());
    if (n_dyads == 0) throw PreconditionError("model fit needs at least two nodes");

    // Pre-fit scan: Gram matrix for the rank check, per-class ranges for the
    // separation check.
    auto scans = over_blocks<ScanBlock>(g, options.workers, [&](std::uint32_t begin,
                                                                std::uint32_t end) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        ScanBlock s{Eigen::MatrixXd::Zero(k, k),
                    std::vector<double>(kk, inf), std::vector<double>(kk, -inf),
                    std::vector<double>(kk, inf), std::vector<double>(kk, -inf)};
        Eigen::VectorXd x(k);
        for_each_dyad(g, begin, end, [&](NodeId i, NodeId j, bool y) {
            model.change(i, j, std::span<double>(x.data(), kk));
            s.gram.selfadjointView<Eigen::Upper>().rankUpdate(x, 1.0);
            auto& lo = y ? s.min1 : s.min0;
            auto& hi = y ? s.max1 : s.max0;
            for (std::size_t c = 0; c < kk; ++c) {
                lo[c] = std::min(lo[c], x[static_cast<Eigen::Index>(c)]);
                hi[c] = std::max(hi[c], x[static_cast<Eigen::Index>(c)]);
            }
            ++(y ? s.ones : s.zeros);
        });
        return s;
    });
    ScanBlock scan = std::move(scans.front());
    for (std::size_t b = 1; b < scans.size(); ++b) {
        scan.gram += scans[b].gram;
        for (std::size_t c = 0; c < kk; ++c) {
            scan.min1[c] = std::min(scan.min1[c], scans[b].min1[c]);
            scan.max1[c] = std::max(scan.max1[c], scans[b].max1[c]);
            scan.min0[c] = std::min(scan.min0[c], scans[b].min0[c]);
            scan.max0[c] = std::max(scan.max0[c], scans[b].max0[c]);
        }
        scan.ones += scans[b].ones;
        scan.zeros += scans[b].zeros;
    }
    scan.gram = scan.gram.selfadjointView<Eigen::Upper>();
    check_rank(scan.gram, names);
    check_separation(model, scan, names);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k);
    const double dens = static_cast<double>(scan.ones) / static_cast<double>(n_dyads);
    for (std::size_t t = 0; t < kk; ++t) {
        if (terms[t].kind == TermKind::Edges) {
            theta[static_cast<Eigen::Index>(t)] = std::log(dens / (1.0 - dens));
            break;
        }
    }

    auto diverged = [&](const Eigen::VectorXd& th) {
        Eigen::Index worst;
        if (th.cwiseAbs().maxCoeff(&worst) > options.divergence_bound) {
            const auto& name = names[static_cast<std::size_t>(worst)];
            throw SeparationError(name, "coefficient of '" + name +
                                            "' diverges; the term (nearly) separates present "
                                            "from absent dyads");
        }
    };

    ErgmFit out;
    out.terms = names;
    Moments cur = accumulate(g, model, theta, options.workers);
    int iter = 0;
    bool converged = false;
    while (iter < options.max_iterations) {
        if (cur.score.cwiseAbs().maxCoeff() < options.score_tolerance) {
            converged = true;
            break;
        }
        Eigen::LDLT<Eigen::MatrixXd> solver(cur.info);
        if (solver.info() != Eigen::Success) throw NumericError("information matrix is singular");
        const Eigen::VectorXd step = solver.solve(cur.score);
        ++iter;

        double t = 1.0;
        Eigen::VectorXd cand = theta + step;
        Moments next = accumulate(g, model, cand, options.workers);
        for (int halving = 0; halving < 30 && next.loglik < cur.loglik; ++halving) {
            t *= 0.5;
            cand = theta + t * step;
            next = accumulate(g, model, cand, options.workers);
        }
        if (next.loglik < cur.loglik) break;  // no ascent direction left
        const double rel = std::abs(next.loglik - cur.loglik) /
                           std::max(std::abs(cur.loglik), std::numeric_limits<double>::min());
        theta = cand;
        cur = std::move(next);
        diverged(theta);
        if (rel < options.relative_loglik_tolerance) {
            converged = true;
            break;
        }
    }
    diverged(theta);

    out.theta.assign(theta.data(), theta.data() + k);
    const Eigen::MatrixXd cov = cur.info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    out.se.resize(kk);
    for (std::size_t t = 0; t < kk; ++t) {
        const double v = cov(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t));
        out.se[t] = v > 0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
    }
    out.log_likelihood = cur.loglik;
    out.residual_deviance = -2.0 * cur.loglik;
    out.null_deviance = 2.0 * std::log(2.0) * static_cast<double>(n_dyads);
    out.n_dyads = n_dyads;
    out.n_edges = g.edge_count();
    out.converged = converged;
    out.iterations = iter;
    force_parameter_count(out, kk);
    return out;
}

double log_likelihood(const CollabNetwork& g, const std::vector<TermSpec>& terms,
                      std::span<const double> theta) {
    if (theta.size() != terms.size()) {
        throw SpecificationError("theta has " + std::to_string(theta.size()) + " entries for " +
                                 std::to_string(terms.size()) + " terms");
    }
    const DyadModel model(g, terms);
    double ll = 0.0;
    for_each_dyad(g, 0, static_cast<std::uint32_t>(g.node_count()),
                  [&](NodeId i, NodeId j, bool y) {
                      const double eta = model.linear_predictor(i, j, theta);
                      ll -= y ? softplus(-eta) : softplus(eta);
                  });
    return ll;
}

nlohmann::json to_json(const ErgmFit& fit) {
    return {
        {"terms", fit.terms},
        {"theta", fit.theta},
        {"se", fit.se},
        {"log_likelihood", fit.log_likelihood},
        {"null_deviance", fit.null_deviance},
        {"residual_deviance", fit.residual_deviance},
        {"aic", fit.aic},
        {"bic", fit.bic},
        {"k", fit.k},
        {"n_dyads", fit.n_dyads},
        {"n_edges", fit.n_edges},
        {"converged", fit.converged},
        {"iterations", fit.iterations},
    };
}

ErgmFit fit_from_json(const nlohmann::json& doc) {
    auto number = [](const nlohmann::json& v) {
        return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    try {
        ErgmFit f;
        f.terms = doc.at("terms").get<std::vector<std::string>>();
        for (const auto& v : doc.at("theta")) f.theta.push_back(number(v));
        for (const auto& v : doc.at("se")) f.se.push_back(number(v));
        f.log_likelihood = number(doc.at("log_likelihood"));
        f.null_deviance = number(doc.at("null_deviance"));
        f.residual_deviance = number(doc.at("residual_deviance"));
        f.aic = number(doc.at("aic"));
        f.bic = number(doc.at("bic"));
        f.k = doc.at("k").get<std::size_t>();
        f.n_dyads = doc.at("n_dyads").get<std::size_t>();
        f.n_edges = doc.value("n_edges", std::size_t{0});
        f.converged = doc.at("converged").get<bool>();
        f.iterations = doc.value("iterations", 0);
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed fit document: ") + e.what());
    }
}

DyadChain::DyadChain(const DyadModel& model, std::span<const double> theta, Rng rng)
    : n_(model.node_count()), rng_(rng) {
    if (theta.size() != model.term_count()) {
        throw SpecificationError("theta has " + std::to_string(theta.size()) + " entries for " +
                                 std::to_string(model.term_count()) + " terms");
    }
    const auto d = dyad_count(n_);
    eta_.reserve(d);
    for (std::uint32_t i = 0; i < n_; ++i) {
        for (std::uint32_t j = i + 1; j < n_; ++j) {
            eta_.push_back(model.linear_predictor(NodeId{i}, NodeId{j}, theta));
        }
    }
    state_.assign(d, 0);
}

void DyadChain::step() {
    ++steps_;
    if (eta_.empty()) return;
    const auto d = uniform_below(rng_, eta_.size());
    const double log_ratio = state_[d] ? -eta_[d] : eta_[d];
    if (log_ratio >= 0.0 || uniform_unit(rng_) < std::exp(log_ratio)) {
        state_[d] ^= 1u;
        edges_ = state_[d] ? edges_ + 1 : edges_ - 1;
        ++accepted_;
    }
}

void DyadChain::run(std::size_t steps) {
    for (std::size_t s = 0; s < steps; ++s) step();
}

std::uint64_t DyadChain::mask() const {
    if (state_.size() > 64) throw SizeGuardError("dyad mask needs at most 64 dyads");
    std::uint64_t m = 0;
    for (std::size_t d = 0; d < state_.size(); ++d) {
        if (state_[d]) m |= std::uint64_t{1} << d;
    }
    return m;
}

std::vector<Edge> DyadChain::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_);
    for (std::size_t d = 0; d < state_.size(); ++d) {
        if (state_[d]) out.push_back(dyad_at(n_, d));
    }
    return out;
}

std::vector<CollabNetwork> simulate(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
                                    const std::vector<TermSpec>& terms,
                                    std::span<const double> theta,
                                    const SimulationOptions& options, Rng& rng) {
    const DyadModel model(nodes, period, terms);
    DyadChain chain(model, theta, Rng(rng()));
    chain.run(options.burn_in);
    const CollabNetwork empty(period, std::vector<NodeAttributes>(nodes.begin(), nodes.end()), {});
    std::vector<CollabNetwork> out;
    out.reserve(options.samples);
    for (std::size_t s = 0; s < options.samples; ++s) {
        chain.run(std::max<std::size_t>(1, options.thinning));
        out.push_back(empty.with_edge_set(chain.edges()));
    }
    return out;
}

CollabNetwork sample_independent(std::span<const NodeAttributes> nodes, const PeriodSpec& period,
                                 const std::vector<TermSpec>& terms,
                                 std::span<const double> theta, Rng& rng) {
    if (theta.size() != terms.size()) {
        throw SpecificationError("theta has " + std::to_string(theta.size()) + " entries for " +
                                 std::to_string(terms.size()) + " terms");
    }
    const DyadModel model(nodes, period, terms);
    std::vector<WeightedEdge> edges;
    const auto n = static_cast<std::uint32_t>(nodes.size());
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i + 1; j < n; ++j) {
            const double p = logistic(model.linear_predictor(NodeId{i}, NodeId{j}, theta));
            if (uniform_unit(rng) < p) edges.push_back({Edge{NodeId{i}, NodeId{j}}, 1});
        }
    }
    return CollabNetwork(period, std::vector<NodeAttributes>(nodes.begin(), nodes.end()),
                         std::move(edges));
}

NormalizerOracle::NormalizerOracle(std::vector<NodeAttributes> nodes, PeriodSpec period,
                                   std::vector<TermSpec> terms, std::vector<double> theta)
    : nodes_(std::move(nodes)),
      period_(std::move(period)),
      terms_(std::move(terms)),
      theta_(std::move(theta)) {
    if (nodes_.size() > kOracleMaxNodes) {
        throw SizeGuardError("enumeration oracle supports at most " +
                             std::to_string(kOracleMaxNodes) + " nodes, got " +
                             std::to_string(nodes_.size()));
    }
    if (theta_.size() != terms_.size()) {
        throw SpecificationError("theta has " + std::to_string(theta_.size()) + " entries for " +
                                 std::to_string(terms_.size()) + " terms");
    }
    const auto count = graph_count();
    std::vector<double> log_weight(count);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        const auto stats = compute_statistics(graph(mask), terms_);
        log_weight[mask] = std::inner_product(stats.begin(), stats.end(), theta_.begin(), 0.0);
        peak = std::max(peak, log_weight[mask]);
    }
    double sum = 0.0;
    for (double w : log_weight) sum += std::exp(w - peak);
    log_normalizer_ = peak + std::log(sum);
    probabilities_.resize(count);
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        probabilities_[mask] = std::exp(log_weight[mask] - log_normalizer_);
    }
}

CollabNetwork NormalizerOracle::graph(std::uint64_t mask) const {
    const auto n = nodes_.size();
    std::vector<WeightedEdge> edges;
    for (std::size_t d = 0; d < dyad_count(n); ++d) {
        if (mask & (std::uint64_t{1} << d)) edges.push_back({dyad_at(n, d), 1});
    }
    return CollabNetwork(period_, nodes_, std::move(edges));
}

double NormalizerOracle::probability(const CollabNetwork& g) const {
    const auto stats = compute_statistics(g, terms_);
    const double w = std::inner_product(stats.begin(), stats.end(), theta_.begin(), 0.0);
    return std::exp(w - log_normalizer_);
}

std::vector<double> oracle_distribution(const NormalizerOracle& oracle) {
    return oracle.distribution();
}

}  // namespace costar::ergm
