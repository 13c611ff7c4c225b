#include "doctest.h"

#include <regex>

#include "costar/error.hpp"
#include "costar/report.hpp"
#include "support.hpp"

using namespace costar;
using namespace costar::report;

namespace {

StarRecord star(std::string id, Region r, std::optional<int> first = std::nullopt) {
    return {std::move(id), "n", r, 1960, first, 0};
}

// One two-person work per listed pair, all in `year`.
Dataset pair_dataset(std::vector<StarRecord> stars, const std::vector<std::pair<std::string, std::string>>& pairs,
                     int year = 1990) {
    std::vector<WorkRecord> works;
    std::vector<CastRecord> cast;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto id = "w" + std::to_string(k);
        works.push_back({id, "t", year, WorkKind::Movie, 0});
        cast.push_back({id, pairs[k].first, 0});
        cast.push_back({id, pairs[k].second, 0});
    }
    return Dataset(std::move(stars), std::move(works), std::move(cast));
}

const std::vector<PeriodSpec> kOnePeriod = {{"1990-1993", 1990, 1993}};

void check_bipartite_identity(const CrossCoopTable& t) {
    for (const auto& row : t.periods) {
        const auto& m = row.cell(Subgroup::All, 0);
        const auto& h = row.cell(Subgroup::All, 1);
        CHECK(m.total == h.total);
        if (m.mean() && h.mean()) {
            CHECK(*m.mean() * static_cast<double>(m.stars) == doctest::Approx(*h.mean() * static_cast<double>(h.stars)));
        }
    }
}

ergm::ErgmFit fake_fit(double homophily) {
    ergm::ErgmFit f;
    f.terms = {"edges", kHomophilyTerm};
    f.theta = {-4.0, homophily};
    f.se = {0.1, 0.05};
    return f;
}

}  // namespace

TEST_CASE("describe") {
    using R = Region;
    std::vector<R> regions(6, R::Mainland);
    regions.insert(regions.end(), 4, R::HongKong);
    std::vector<std::pair<unsigned, unsigned>> edges;
    for (unsigned i = 0; i < 10; ++i) edges.push_back({i, (i + 1) % 10});
    edges.push_back({0, 5});
    edges.push_back({2, 7});
    const auto g = testing::graph(testing::nodes_of(regions), edges);
    const RegionSet mh{R::Mainland, R::HongKong};
    const auto s = describe(g, mh);
    CHECK(s.stars == 10);
    CHECK(s.edges == 12);
    CHECK(s.average_degree == doctest::Approx(2.4));
    REQUIRE(s.region_share.size() == 2);
    CHECK(s.region_share[0].second == doctest::Approx(60.0));
    CHECK(s.region_share[1].second == doctest::Approx(40.0));

    const auto single = describe(testing::graph(1, {}));
    CHECK(single.average_degree == 0.0);
    CHECK(single.clustering == 0.0);
    CHECK_THROWS_AS(describe(CollabNetwork{}), UndefinedInputError);

    const auto k4e = testing::graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
    CHECK(describe(k4e).clustering == doctest::Approx(0.8333).epsilon(1e-4));
    CHECK(describe(k4e, RegionSet::all(), ClusteringKind::Transitivity).clustering == doctest::Approx(0.75));

    const auto dir = testing::temp_dir("report_describe");
    const std::vector<PeriodSummary> rows = {s, empty_summary({"2010", 2010, 2010}, mh)};
    write_period_summaries(rows, mh, dir / "d.csv");
    CHECK(read_period_summaries(dir / "d.csv") == rows);
}

TEST_CASE("cross-cooperation means") {
    using R = Region;
    SUBCASE("single weighted cross edge") {
        const auto ds = pair_dataset({star("m", R::Mainland), star("h", R::HongKong)}, {{"m", "h"}, {"h", "m"}});
        const auto t = cross_coop_table(ds, kOnePeriod, R::Mainland, R::HongKong);
        CHECK(t.periods[0].cell(Subgroup::All, 0).mean() == 2.0);
        CHECK(t.periods[0].cell(Subgroup::All, 1).mean() == 2.0);
    }
    SUBCASE("no cross edges") {
        const auto ds = pair_dataset({star("m1", R::Mainland), star("m2", R::Mainland), star("h1", R::HongKong),
                                      star("h2", R::HongKong)},
                                     {{"m1", "m2"}, {"h1", "h2"}});
        const auto t = cross_coop_table(ds, kOnePeriod, R::Mainland, R::HongKong);
        CHECK(t.periods[0].cell(Subgroup::All, 0).mean() == 0.0);
        CHECK(t.periods[0].cell(Subgroup::All, 1).mean() == 0.0);
    }
    SUBCASE("three HongKong stars shared by ten Mainland stars") {
        std::vector<StarRecord> stars;
        for (int i = 0; i < 10; ++i) stars.push_back(star("m" + std::to_string(i), R::Mainland));
        for (int i = 0; i < 3; ++i) stars.push_back(star("h" + std::to_string(i), R::HongKong));
        const auto ds = pair_dataset(stars, {{"h0", "m0"}, {"h0", "m1"}, {"h0", "m2"}, {"h0", "m3"},
                                             {"h1", "m4"}, {"h1", "m5"}, {"h1", "m6"}, {"h1", "m7"},
                                             {"h1", "m8"}, {"h1", "m9"},
                                             {"h2", "m0"}, {"h2", "m4"}});
        const auto t = cross_coop_table(ds, kOnePeriod, R::Mainland, R::HongKong);
        const auto& row = t.periods[0];
        CHECK(row.cell(Subgroup::All, 1).mean() == 4.0);
        CHECK(row.cell(Subgroup::All, 0).mean() == 1.2);
        CHECK(row.cell(Subgroup::All, 0).stars == 10);
        check_bipartite_identity(t);
        // First schedule period has no lag, so fame cells are empty.
        CHECK(!row.cell(Subgroup::Famous, 0).mean());
        CHECK(!row.cell(Subgroup::LessFamous, 1).mean());
        // Everyone starts in 1990: no older generation.
        CHECK(!row.cell(Subgroup::Older, 0).mean());
        CHECK(row.cell(Subgroup::Newer, 0).mean() == 1.2);
        CHECK(t.total.label == "Total");
        CHECK(t.total.cells == row.cells);

        const auto dir = testing::temp_dir("report_coop");
        write_cross_coop_table(t, dir / "c.csv");
        const auto text = testing::slurp(dir / "c.csv");
        CHECK(text.find(",,0,") != std::string::npos);  // blank mean, zero stars
        CHECK(read_cross_coop_table(dir / "c.csv") == t);
    }
    SUBCASE("period missing a region yields an empty row") {
        const auto ds = pair_dataset({star("m1", R::Mainland), star("m2", R::Mainland), star("h", R::HongKong)},
                                     {{"m1", "m2"}});
        const auto t = cross_coop_table(ds, kOnePeriod, R::Mainland, R::HongKong);
        CHECK(!t.periods[0].cell(Subgroup::All, 0).mean());
    }
}

TEST_CASE("subgroup rules") {
    using R = Region;
    // Period 1 builds up popularity; period 2 is scored.
    std::vector<StarRecord> stars = {star("m0", R::Mainland, 1985), star("m1", R::Mainland),
                                     star("m2", R::Mainland), star("m3", R::Mainland),
                                     star("h0", R::HongKong, 1980), star("h1", R::HongKong)};
    std::vector<WorkRecord> works;
    std::vector<CastRecord> cast;
    auto add = [&](int year, std::vector<std::string> members) {
        const auto id = "w" + std::to_string(works.size());
        works.push_back({id, "t", year, WorkKind::Movie, 0});
        for (auto& m : members) cast.push_back({id, m, 0});
    };
    for (int k = 0; k < 5; ++k) add(1986, {"m0", "m1"});
    add(1987, {"m2", "h0"});
    add(1988, {"m3"});
    add(1987, {"h1"});
    add(1990, {"m0", "h0"});
    add(1991, {"m0", "h1"});
    add(1992, {"m1", "h0", "m2"});
    add(1993, {"m3", "h1"});
    const Dataset ds(stars, works, cast);
    const std::vector<PeriodSpec> schedule = {{"1986-1989", 1986, 1989}, {"1990-1993", 1990, 1993}};
    const auto t = cross_coop_table(ds, schedule, R::Mainland, R::HongKong);
    const auto& row = t.periods[1];
    // Lagged events: m0 5, m1 5, m2 1, m3 0; top quartile threshold = 5.
    CHECK(row.cell(Subgroup::Famous, 0).stars == 2);
    CHECK(row.cell(Subgroup::LessFamous, 0).stars == 2);
    CHECK(row.cell(Subgroup::Famous, 0).mean() == 1.5);  // m0: 2, m1: 1
    CHECK(row.cell(Subgroup::LessFamous, 0).mean() == 1.0);  // m2: 1, m3: 1
    // HongKong lag: h0 1, h1 0; threshold 0.75, so h0 alone is famous.
    CHECK(row.cell(Subgroup::Famous, 1).stars == 1);
    CHECK(row.cell(Subgroup::Famous, 1).mean() == 3.0);
    // Older generation: first work before 1990 (everyone here).
    CHECK(row.cell(Subgroup::Older, 0).stars == 4);
    CHECK(!row.cell(Subgroup::Newer, 0).mean());
    check_bipartite_identity(t);

    SubgroupSpec late;
    late.generation_cutoff = 1987;
    const auto t2 = cross_coop_table(ds, schedule, R::Mainland, R::HongKong, late);
    CHECK(t2.periods[1].cell(Subgroup::Older, 0).stars == 2);  // m0 (1985), m1 (1986)
    SubgroupSpec bad;
    bad.fame_quantile = 1.5;
    CHECK_THROWS_AS(cross_coop_table(ds, schedule, R::Mainland, R::HongKong, bad), ConfigError);
}

TEST_CASE("index trend export") {
    const auto dir = testing::temp_dir("report_index");
    std::vector<IndexResult> results;
    for (int k = 0; k < 3; ++k) {
        IndexResult r;
        r.period = std::to_string(1990 + k);
        r.observed = 10 + static_cast<std::size_t>(k);
        r.expected = 20.5;
        r.ratio = static_cast<double>(r.observed) / r.expected;
        r.ci_low = r.ratio * 0.9;
        r.ci_high = r.ratio * 1.2;
        results.push_back(r);
    }
    export_index_trend(results, dir / "i.csv");
    const auto text = testing::slurp(dir / "i.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    const auto back = read_index_trend(dir / "i.csv");
    REQUIRE(back.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back[k].period == results[k].period);
        CHECK(back[k].observed == results[k].observed);
        CHECK(back[k].ratio == results[k].ratio);
        CHECK(back[k].ci_high == results[k].ci_high);
    }

    export_index_trend({}, dir / "empty.csv");
    CHECK(testing::slurp(dir / "empty.csv") == "period,observed,expected,ratio,ci_low,ci_high\n");
    CHECK_THROWS_AS(export_index_trend(results, dir / "no" / "such" / "dir.csv"), ConfigError);

    auto taiwan = results;
    taiwan[1].ratio = 0.9;
    const std::vector<IndexSeries> series = {{"Mainland-HongKong", results}, {"Mainland-Taiwan", taiwan}};
    write_index_svg(series, dir / "i.svg");
    const auto svg = testing::slurp(dir / "i.svg");
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
    CHECK(polylines == 2);
    CHECK(svg.find("<script") == std::string::npos);

    const std::regex tick(R"re(<text class="y-tick"[^>]*>([^<]+)</text>)re");
    std::vector<double> ticks;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), tick); it != std::sregex_iterator(); ++it) {
        ticks.push_back(std::stod((*it)[1].str()));
    }
    REQUIRE(ticks.size() >= 2);
    CHECK(ticks.front() == 0.0);
    CHECK(ticks.back() == doctest::Approx(0.9 * 1.1).epsilon(1e-5));
}

TEST_CASE("coefficient summary") {
    const auto dir = testing::temp_dir("report_coef");
    // Published homophily coefficients of the five periods.
    const std::vector<std::pair<std::string, double>> published = {
        {"1990-1993", 1.1}, {"1994-1997", 1.3}, {"1998-2001", 1.81}, {"2002-2005", 1.71}, {"2006-2009", 1.59}};
    std::vector<std::pair<std::string, ergm::ErgmFit>> fits;
    for (const auto& [label, value] : published) fits.emplace_back(label, fake_fit(value));
    export_coefficient_summary(fits, kHomophilyTerm, dir / "c.csv");
    const auto rows = read_coefficient_summary(dir / "c.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(rows[k].period == published[k].first);
        CHECK(rows[k].coefficient == published[k].second);
        CHECK(rows[k].se == 0.05);
    }
    CHECK(testing::slurp(dir / "c.csv").substr(0, 41) == "period,coefficient,se\n1990-1993,1.1,0.05\n");

    const std::vector<std::pair<std::string, ergm::ErgmFit>> one = {fits[0]};
    export_coefficient_summary(one, kHomophilyTerm, dir / "one.csv");
    CHECK(read_coefficient_summary(dir / "one.csv").size() == 1);

    fits[3].second.terms[1] = "nodefactor.region.HongKong";
    try {
        export_coefficient_summary(fits, kHomophilyTerm, dir / "bad.csv");
        FAIL("expected SpecificationError");
    } catch (const SpecificationError& e) {
        CHECK(std::string(e.what()).find("2002-2005") != std::string::npos);
    }
}
