#include "doctest.h"

#include <bit>
#include <cmath>
#include <map>

#include "costar/ergm.hpp"
#include "costar/error.hpp"
#include "support.hpp"

using namespace costar;
using namespace costar::ergm;
using testing::graph;

namespace {

std::vector<NodeAttributes> with_counts(std::vector<NodeAttributes> nodes, std::vector<int> counts) {
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].prev_cooperation_count = counts[i];
    return nodes;
}

const std::vector<TermSpec> kMixed = {TermSpec::edges(), TermSpec::node_match("region"),
                                      TermSpec::node_cov("prev_cooperation_count"),
                                      TermSpec::node_factor("region", "HongKong", "Mainland")};

}  // namespace

TEST_CASE("network statistics") {
    using R = Region;
    CHECK(compute_statistics(graph(3, {{0, 1}, {1, 2}, {0, 2}}), {TermSpec::edges()}) ==
          std::vector<double>{3});

    const auto nodes = testing::nodes_of({R::Mainland, R::Mainland, R::HongKong});
    const std::vector<TermSpec> match = {TermSpec::node_match("region")};
    CHECK(compute_statistics(graph(nodes, {{0, 2}}), match) == std::vector<double>{0});
    CHECK(compute_statistics(graph(nodes, {{0, 1}}), match) == std::vector<double>{1});

    const auto path = graph(with_counts(testing::nodes_of({R::Mainland, R::Mainland, R::Mainland}), {1, 2, 3}),
                            {{0, 1}, {1, 2}});
    CHECK(compute_statistics(path, {TermSpec::node_cov("prev_cooperation_count")}) ==
          std::vector<double>{8});

    // Endpoint incidences at HongKong: edges 0-2 and 2-3 touch HongKong node 2 twice, plus node 3.
    const auto four = graph(testing::nodes_of({R::Mainland, R::Mainland, R::HongKong, R::HongKong}),
                            {{0, 2}, {2, 3}, {0, 1}});
    CHECK(compute_statistics(four, {TermSpec::node_factor("region", "HongKong")}) ==
          std::vector<double>{3});
}

TEST_CASE("change statistics") {
    using R = Region;
    const auto nodes = with_counts(testing::nodes_of({R::Mainland, R::Mainland, R::HongKong}), {4, 7, 0});
    const auto g = graph(nodes, {});
    CHECK(change_statistics(g, {TermSpec::edges()}, NodeId{0}, NodeId{2}) == std::vector<double>{1});
    CHECK(change_statistics(g, {TermSpec::node_match("region")}, NodeId{0}, NodeId{1}) ==
          std::vector<double>{1});
    CHECK(change_statistics(g, {TermSpec::node_match("region")}, NodeId{0}, NodeId{2}) ==
          std::vector<double>{0});
    CHECK(change_statistics(g, {TermSpec::node_cov("prev_cooperation_count")}, NodeId{0}, NodeId{1}) ==
          std::vector<double>{11});
    CHECK_THROWS_AS(change_statistics(g, {TermSpec::edges()}, NodeId{1}, NodeId{1}), PreconditionError);
}

TEST_CASE("change statistics equal explicit statistic differences") {
    auto rng = make_rng(2024, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 3 + uniform_below(rng, 8);
        const auto m = uniform_below(rng, n * (n - 1) / 2 + 1);
        const auto g = testing::random_graph(testing::random_nodes(n, rng), m, rng);
        auto terms = resolve_terms(g.nodes(), g.period(), default_term_requests());
        terms.push_back(TermSpec::node_match("age_group"));
        terms.push_back(TermSpec::node_cov("birth_year"));
        const auto i = NodeId{static_cast<std::uint32_t>(uniform_below(rng, n))};
        auto j = NodeId{static_cast<std::uint32_t>(uniform_below(rng, n - 1))};
        if (j >= i) j.value++;
        const auto plus = compute_statistics(g.has_edge(i, j) ? g : g.with_edge(i, j), terms);
        const auto minus = compute_statistics(g.has_edge(i, j) ? g.without_edge(i, j) : g, terms);
        const auto delta = change_statistics(g, terms, i, j);
        const DyadModel model(g, terms);
        const auto direct = model.change(i, j);
        for (std::size_t t = 0; t < terms.size(); ++t) {
            CHECK(delta[t] == plus[t] - minus[t]);
            CHECK(direct[t] == delta[t]);
        }
    }
}

TEST_CASE("dyad indexing") {
    CHECK(dyad_count(4) == 6);
    std::size_t k = 0;
    for (std::uint32_t i = 0; i < 7; ++i) {
        for (std::uint32_t j = i + 1; j < 7; ++j, ++k) {
            CHECK(dyad_index(7, NodeId{i}, NodeId{j}) == k);
            CHECK(dyad_index(7, NodeId{j}, NodeId{i}) == k);
            CHECK(dyad_at(7, k) == Edge{NodeId{i}, NodeId{j}});
        }
    }
}

TEST_CASE("design matrix") {
    const auto rows = build_design(graph(4, {}), {TermSpec::edges()});
    CHECK(rows.size() == 6);
    for (const auto& r : rows) CHECK(!r.response);
    const auto k3 = build_design(graph(3, {{0, 1}, {1, 2}, {0, 2}}), {TermSpec::edges()});
    CHECK(k3.size() == 3);
    for (const auto& r : k3) CHECK(r.response);
    CHECK_THROWS_AS(build_design(graph(10, {}), {TermSpec::edges()}, 44), SizeGuardError);
}

TEST_CASE("edges-only fits match the closed form") {
    const auto half = fit(graph(4, {{0, 1}, {1, 2}, {2, 3}}), {TermSpec::edges()});
    CHECK(half.converged);
    CHECK(std::abs(half.theta[0]) < 1e-9);

    const auto fifth = fit(graph(5, {{0, 1}, {2, 3}}), {TermSpec::edges()});
    CHECK(std::abs(fifth.theta[0] - std::log(0.25)) < 1e-6);
    CHECK(std::abs(fifth.theta[0] - -1.3863) < 1e-4);
    // se of a logit with p = 0.2 over 10 dyads: 1 / sqrt(10 * 0.2 * 0.8).
    CHECK(fifth.se[0] == doctest::Approx(1.0 / std::sqrt(1.6)).epsilon(1e-9));
    CHECK(fifth.null_deviance == doctest::Approx(20.0 * std::log(2.0)));
}

TEST_CASE("information criteria") {
    const auto ic = information_criteria(65017, 12, 766941);
    CHECK(ic.aic == 65041);
    CHECK(std::round(ic.bic) == 65180);

    auto f = fit(graph(5, {{0, 1}, {2, 3}}), {TermSpec::edges()});
    CHECK(f.aic == f.residual_deviance + 2.0 * static_cast<double>(f.k));
    CHECK(f.bic == f.residual_deviance + static_cast<double>(f.k) * std::log(static_cast<double>(f.n_dyads)));
    force_parameter_count(f, 12);
    CHECK(f.aic - f.residual_deviance == doctest::Approx(24.0));
}

TEST_CASE("diagnostics for unidentifiable models") {
    using R = Region;
    SUBCASE("collinear columns") {
        // Each dyad's two region dummies sum to 2, the edges column times two.
        auto nodes = testing::nodes_of({R::Mainland, R::HongKong, R::Mainland, R::HongKong, R::Mainland, R::HongKong});
        const auto g = graph(nodes, {{0, 1}, {1, 2}, {2, 3}, {0, 5}, {0, 2}});
        const std::vector<TermSpec> terms = {TermSpec::edges(), TermSpec::node_factor("region", "Mainland"),
                                             TermSpec::node_factor("region", "HongKong")};
        try {
            fit(g, terms);
            FAIL("expected RankDeficiencyError");
        } catch (const RankDeficiencyError& e) {
            CHECK(std::string(e.what()).find("nodefactor.region") != std::string::npos);
        }
    }
    SUBCASE("perfect prediction") {
        auto nodes = testing::nodes_of({R::Mainland, R::Mainland, R::Mainland, R::HongKong, R::HongKong});
        const auto g = graph(nodes, {{0, 1}, {3, 4}});
        try {
            fit(g, {TermSpec::edges(), TermSpec::node_match("region")});
            FAIL("expected SeparationError");
        } catch (const SeparationError& e) {
            CHECK(e.term() == "nodematch.region");
        }
    }
    SUBCASE("empty graph") {
        CHECK_THROWS_AS(fit(graph(4, {}), {TermSpec::edges()}), SeparationError);
    }
}

TEST_CASE("fits are worker independent and self-consistent") {
    auto rng = make_rng(77, 0);
    const auto nodes = testing::random_nodes(80, rng);
    const std::vector<double> theta = {-2.5, 1.0, 0.05, 0.3};
    const auto g = sample_independent(nodes, testing::kPeriod, kMixed, theta, rng);
    const auto a = fit(g, kMixed);
    FitOptions four;
    four.workers = 4;
    const auto b = fit(g, kMixed, four);
    CHECK(a.theta == b.theta);
    CHECK(a.se == b.se);
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(log_likelihood(g, kMixed, a.theta) == doctest::Approx(a.log_likelihood).epsilon(1e-12));
    CHECK(a.residual_deviance == doctest::Approx(-2.0 * a.log_likelihood));

    // The MLE is a stationary point: nudging any coordinate lowers the likelihood.
    for (std::size_t t = 0; t < theta.size(); ++t) {
        for (double h : {-1e-3, 1e-3}) {
            auto moved = a.theta;
            moved[t] += h;
            CHECK(log_likelihood(g, kMixed, moved) < a.log_likelihood);
        }
    }

    const auto back = fit_from_json(to_json(a));
    CHECK(back.theta == a.theta);
    CHECK(back.terms == a.terms);
    CHECK(back.bic == a.bic);
}

TEST_CASE("term requests") {
    using R = Region;
    auto nodes = testing::nodes_of({R::Mainland, R::HongKong, R::Taiwan});
    nodes[0].birth_year = 1950;
    const auto terms = resolve_terms(nodes, testing::kPeriod, default_term_requests());
    std::vector<std::string> names;
    for (const auto& t : terms) names.push_back(t.name());
    CHECK(names.front() == "edges");
    CHECK(names.back() == "nodematch.region");
    CHECK(std::find(names.begin(), names.end(), "nodefactor.region.HongKong") != names.end());
    CHECK(std::find(names.begin(), names.end(), "nodefactor.region.Taiwan") != names.end());
    CHECK(std::find(names.begin(), names.end(), "nodefactor.region.Mainland") == names.end());
    CHECK(std::find(names.begin(), names.end(), "nodecov.prev_cooperation_count") != names.end());

    const auto round = parse_term_requests(to_json(default_term_requests()));
    CHECK(to_json(round) == to_json(default_term_requests()));

    CHECK_THROWS_AS(parse_term_requests(nlohmann::json::parse(R"([{"type":"triangle"}])")),
                    SpecificationError);
    const auto unknown = parse_term_requests(nlohmann::json::parse(R"([{"type":"nodecov","attribute":"height"}])"));
    CHECK_THROWS_AS(resolve_terms(nodes, testing::kPeriod, unknown), SpecificationError);
    const auto self_ref = parse_term_requests(nlohmann::json::parse(
        R"([{"type":"nodefactor","attribute":"region","level":"Mainland","reference":"Mainland"}])"));
    CHECK_THROWS_AS(resolve_terms(nodes, testing::kPeriod, self_ref), SpecificationError);
}

TEST_CASE("normalizer oracle") {
    using R = Region;
    SUBCASE("uniform at theta = 0") {
        NormalizerOracle o(testing::nodes_of({R::Mainland, R::HongKong, R::Mainland}), testing::kPeriod,
                           kMixed, {0, 0, 0, 0});
        REQUIRE(o.graph_count() == 8);
        for (double p : oracle_distribution(o)) CHECK(p == doctest::Approx(0.125));
    }
    SUBCASE("edges-only distribution factorizes") {
        const double theta = -0.7;
        const double p = 1.0 / (1.0 + std::exp(-theta));
        NormalizerOracle o(testing::nodes_of(std::vector<R>(4, R::Mainland)), testing::kPeriod,
                           {TermSpec::edges()}, {theta});
        const auto& dist = o.distribution();
        for (std::uint64_t mask = 0; mask < dist.size(); ++mask) {
            const int k = std::popcount(mask);
            CHECK(dist[mask] == doctest::Approx(std::pow(p, k) * std::pow(1 - p, 6 - k)).epsilon(1e-12));
        }
    }
    SUBCASE("mixed terms agree with a Gray-code enumeration") {
        auto nodes = with_counts(testing::nodes_of({R::Mainland, R::HongKong, R::Mainland, R::Taiwan}), {3, 0, 5, 1});
        const std::vector<double> theta = {-0.4, 0.9, 0.12, -0.6};
        NormalizerOracle o(nodes, testing::kPeriod, kMixed, theta);

        // Walk graphs in Gray-code order, updating statistics with single toggles
        // computed from scratch on the current graph.
        const std::size_t d = dyad_count(4);
        std::map<std::uint64_t, double> weight;
        std::uint64_t mask = 0;
        auto g = graph(nodes, {});
        std::vector<double> stats(theta.size(), 0.0);
        auto log_w = [&] {
            double s = 0;
            for (std::size_t t = 0; t < theta.size(); ++t) s += theta[t] * stats[t];
            return s;
        };
        weight[0] = std::exp(log_w());
        for (std::uint64_t step = 1; step < (1u << d); ++step) {
            const auto bit = static_cast<std::size_t>(std::countr_zero(step));
            const auto e = dyad_at(4, bit);
            const auto s = compute_statistics(g.has_edge(e.u, e.v) ? g.without_edge(e.u, e.v) : g.with_edge(e.u, e.v), kMixed);
            g = g.has_edge(e.u, e.v) ? g.without_edge(e.u, e.v) : g.with_edge(e.u, e.v);
            stats = s;
            mask ^= std::uint64_t{1} << bit;
            weight[mask] = std::exp(log_w());
        }
        double z = 0;
        for (const auto& [m, w] : weight) z += w;
        REQUIRE(weight.size() == o.graph_count());
        CHECK(std::log(z) == doctest::Approx(o.log_normalizer()).epsilon(1e-12));
        for (const auto& [m, w] : weight) {
            CHECK(std::abs(o.distribution()[m] - w / z) < 1e-12);
            CHECK(std::abs(o.probability(o.graph(m)) - w / z) < 1e-12);
        }
    }
    SUBCASE("size guard") {
        CHECK_THROWS_AS(NormalizerOracle(testing::nodes_of(std::vector<R>(7, R::Mainland)), testing::kPeriod,
                                         {TermSpec::edges()}, {0.0}),
                        SizeGuardError);
    }
}

TEST_CASE("simulation") {
    using R = Region;
    SUBCASE("theta = 0 is uniform over graphs") {
        const auto nodes = testing::nodes_of({R::Mainland, R::HongKong, R::Mainland, R::HongKong});
        auto rng = make_rng(1, 0);
        SimulationOptions opt;
        opt.burn_in = 1000;
        opt.samples = 100000;
        opt.thinning = 3;
        const auto draws = simulate(nodes, testing::kPeriod, kMixed, std::vector<double>(4, 0.0), opt, rng);
        REQUIRE(draws.size() == opt.samples);
        std::vector<double> freq(6, 0.0);
        for (const auto& g : draws)
            for (const auto& e : g.edges()) freq[dyad_index(4, e.edge.u, e.edge.v)] += 1.0;
        for (double f : freq) CHECK(std::abs(f / static_cast<double>(opt.samples) - 0.5) <= 0.01);
    }
    SUBCASE("edges-only density follows the logistic") {
        const auto nodes = testing::nodes_of(std::vector<R>(30, R::Mainland));
        auto rng = make_rng(2, 0);
        SimulationOptions opt;
        opt.burn_in = 20000;
        opt.samples = 400;
        opt.thinning = 500;
        const auto draws = simulate(nodes, testing::kPeriod, {TermSpec::edges()}, std::vector<double>{-1.3863}, opt, rng);
        double total = 0;
        for (const auto& g : draws) total += density(g);
        CHECK(std::abs(total / static_cast<double>(draws.size()) - 0.20) <= 0.01);
    }
    SUBCASE("theta length mismatch") {
        auto rng = make_rng(3, 0);
        CHECK_THROWS_AS(simulate(testing::nodes_of({R::Mainland, R::Mainland}), testing::kPeriod, kMixed,
                                 std::vector<double>{0.0}, SimulationOptions{}, rng),
                        SpecificationError);
    }
}

TEST_CASE("chain bookkeeping") {
    const auto nodes = testing::nodes_of(std::vector<Region>(5, Region::Mainland));
    const DyadModel model(nodes, testing::kPeriod, {TermSpec::edges()});
    const std::vector<double> theta = {0.3};
    DyadChain chain(model, theta, make_rng(4, 0));
    chain.run(5000);
    CHECK(chain.steps() == 5000);
    CHECK(chain.accepted() <= chain.steps());
    CHECK(chain.edges().size() == chain.edge_count());
    CHECK(static_cast<std::size_t>(std::popcount(chain.mask())) == chain.edge_count());
}
