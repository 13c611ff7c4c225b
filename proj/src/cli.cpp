#include "costar/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "costar/error.hpp"
#include "costar/ingest.hpp"
#include "costar/null_model.hpp"
#include "costar/rng.hpp"

#ifndef COSTAR_VERSION
#define COSTAR_VERSION "0.0.0"
#endif

namespace costar::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
    if (!os.flush()) throw ConfigError("failed writing " + path.string());
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

json read_json(const fs::path& path, const char* what) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(std::string("cannot open ") + what + " file: " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string period_label(int start, int end) {
    return start == end ? std::to_string(start)
                        : std::to_string(start) + "-" + std::to_string(end);
}

RegionSet region_set(const std::vector<Region>& regions) {
    RegionSet set;
    for (Region r : regions) set.insert(r);
    return set;
}

std::string pair_name(const std::vector<Region>& regions) {
    std::string name;
    for (Region r : regions) name += (name.empty() ? "" : "-") + std::string(to_string(r));
    return name;
}

std::vector<std::string> cmd_describe(const RunConfig& c, const Dataset& ds) {
    const auto included = region_set(c.regions);
    std::vector<report::PeriodSummary> rows;
    for (const auto& p : c.schedule) {
        const auto g = project(ds, p, included);
        rows.push_back(g.empty() ? report::empty_summary(p, included) : report::describe(g, included, c.clustering));
    }
    report::write_period_summaries(rows, included, c.out / "describe.csv");
    return {"describe.csv"};
}

std::vector<std::string> cmd_index(const RunConfig& c, const Dataset& ds) {
    const Region r1 = c.regions[0], r2 = c.regions[1];
    std::vector<IndexResult> results;
    for (std::size_t k = 0; k < c.schedule.size(); ++k) {
        const auto g = project(ds, c.schedule[k], {r1, r2});
        SwapConfig cfg;
        cfg.swap_multiplier = c.swap_multiplier;
        cfg.replicates = c.replicates;
        cfg.seed = derive_seed(c.seed, k);
        cfg.workers = c.workers;
        results.push_back(cross_region_index(g, r1, r2, cfg));
    }
    report::export_index_trend(results, c.out / "index.csv");
    std::vector<std::string> written = {"index.csv"};
    if (c.svg) {
        const report::IndexSeries series[] = {{pair_name(c.regions), results}};
        report::write_index_svg(series, c.out / "index.svg");
        written.push_back("index.svg");
    }
    return written;
}

std::vector<std::string> cmd_ergm(const RunConfig& c, const Dataset& ds) {
    // One extra leading period so every reported period has lagged attributes.
    std::vector<PeriodSpec> extended = {preceding_period(c.schedule.front())};
    extended.insert(extended.end(), c.schedule.begin(), c.schedule.end());
    const auto attrs = derive_attributes(ds, extended, c.subgroups.popularity);

    fs::create_directories(c.out / "ergm");
    std::vector<std::string> written;
    std::vector<std::pair<std::string, ergm::ErgmFit>> fits;
    for (std::size_t k = 0; k < c.schedule.size(); ++k) {
        const auto& p = c.schedule[k];
        const auto g = project(ds, p, region_set(c.regions), &attrs[k + 1]);
        if (g.node_count() < 2) {
            throw UndefinedInputError("period '" + p.label + "' has fewer than two stars");
        }
        const auto terms = ergm::resolve_terms(g.nodes(), p, c.terms);
        ergm::FitOptions options;
        options.workers = c.workers;
        ergm::ErgmFit f;
        try {
            f = ergm::fit(g, terms, options);
        } catch (const SeparationError& e) {
            throw SeparationError(e.term(), "period '" + p.label + "': " + e.what());
        } catch (const RankDeficiencyError& e) {
            throw RankDeficiencyError("period '" + p.label + "': " + e.what());
        }
        auto doc = ergm::to_json(f);
        doc["period"] = {{"label", p.label}, {"start", p.start_year}, {"end", p.end_year}};
        doc["nodes"] = g.node_count();
        const auto name = "ergm/" + p.label + ".json";
        write_text(c.out / name, dump(doc));
        written.push_back(name);
        fits.emplace_back(p.label, std::move(f));
    }
    report::export_coefficient_summary(fits, c.summary_term, c.out / "coefficients.csv");
    written.push_back("coefficients.csv");
    return written;
}

std::vector<std::string> cmd_subgroups(const RunConfig& c, const Dataset& ds) {
    const auto table =
        report::cross_coop_table(ds, c.schedule, c.regions[0], c.regions[1], c.subgroups);
    report::write_cross_coop_table(table, c.out / "subgroups.csv");
    return {"subgroups.csv"};
}

json versions() {
    return {{"costar", COSTAR_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"cli11", CLI11_VERSION}};
}

}  // namespace

void RunConfig::validate() const {
    static const std::vector<std::string> commands = {"describe", "index", "ergm", "subgroups"};
    if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
        throw ConfigError("unknown command '" + command + "'");
    }
    if (stars.empty() || works.empty() || cast.empty()) {
        throw ConfigError("--stars, --works and --cast are required");
    }
    if (out.empty()) throw ConfigError("--out is required");
    if (regions.empty()) throw ConfigError("--regions must name at least one region");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        for (std::size_t j = i + 1; j < regions.size(); ++j) {
            if (regions[i] == regions[j]) throw ConfigError("--regions lists a region twice");
        }
    }
    if (command != "describe" && regions.size() != 2) {
        throw ConfigError("'" + command + "' needs exactly two regions");
    }
    if (schedule.empty()) throw ConfigError("empty period schedule");
    validate_schedule(schedule);
    if (command == "index") {
        SwapConfig cfg;
        cfg.swap_multiplier = swap_multiplier;
        cfg.replicates = replicates;
        cfg.validate();
    }
    if (command == "ergm" && terms.empty()) throw ConfigError("empty term list");
    subgroups.validate();
}

json to_json(const RunConfig& c) {
    json doc = {{"command", c.command},
                {"stars", c.stars.generic_string()},
                {"works", c.works.generic_string()},
                {"cast", c.cast.generic_string()},
                {"regions", json::array()},
                {"periods", json::array()},
                {"seed", c.seed}};
    for (Region r : c.regions) doc["regions"].push_back(std::string(to_string(r)));
    for (const auto& p : c.schedule) {
        doc["periods"].push_back({{"label", p.label}, {"start", p.start_year}, {"end", p.end_year}});
    }
    if (c.command == "describe") {
        doc["clustering"] = c.clustering == report::ClusteringKind::MeanLocal ? "local" : "global";
    }
    if (c.command == "index") {
        doc["replicates"] = c.replicates;
        doc["swap_multiplier"] = c.swap_multiplier;
        doc["svg"] = c.svg;
    }
    if (c.command == "ergm") {
        doc["terms"] = ergm::to_json(c.terms);
        doc["summary_term"] = c.summary_term;
    }
    if (c.command == "ergm" || c.command == "subgroups") {
        doc["popularity"] = c.subgroups.popularity == PopularityMeasure::Events ? "events" : "partners";
    }
    if (c.command == "subgroups") {
        doc["fame_quantile"] = c.subgroups.fame_quantile;
        doc["generation_cutoff"] = c.subgroups.generation_cutoff;
    }
    return doc;
}

std::vector<PeriodSpec> parse_periods(const json& doc) {
    if (!doc.is_array() || doc.empty()) throw ConfigError("periods must be a non-empty JSON array");
    std::vector<PeriodSpec> out;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("start") || !item.contains("end") ||
            !item["start"].is_number_integer() || !item["end"].is_number_integer()) {
            throw ConfigError("each period needs integer \"start\" and \"end\"");
        }
        PeriodSpec p;
        p.start_year = item["start"].get<int>();
        p.end_year = item["end"].get<int>();
        if (item.contains("label")) {
            if (!item["label"].is_string()) throw ConfigError("period \"label\" must be a string");
            p.label = item["label"].get<std::string>();
        } else {
            p.label = period_label(p.start_year, p.end_year);
        }
        if (p.label.empty() || p.label.find_first_of("/\\") != std::string::npos) {
            throw ConfigError("period label '" + p.label + "' is not usable as a file name");
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<std::string> execute(const RunConfig& c) {
    c.validate();
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.out.string() + ": " + ec.message());

    const auto ds = load_dataset(c.stars, c.works, c.cast);
    std::vector<std::string> written;
    if (c.command == "describe") {
        written = cmd_describe(c, ds);
    } else if (c.command == "index") {
        written = cmd_index(c, ds);
    } else if (c.command == "ergm") {
        written = cmd_ergm(c, ds);
    } else {
        written = cmd_subgroups(c, ds);
    }

    const auto config = to_json(c);
    write_text(c.out / "config.json", dump(config));
    written.push_back("config.json");
    std::sort(written.begin(), written.end());

    json manifest = {{"tool", "costar"},
                     {"command", c.command},
                     {"versions", versions()},
                     {"seed", c.seed},
                     {"duplicate_cast_rows", ds.duplicate_cast_rows()},
                     {"config", config},
                     {"outputs", written}};
    write_text(c.out / "manifest.json", dump(manifest));
    written.push_back("manifest.json");
    std::sort(written.begin(), written.end());
    return written;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Co-starring network analysis: descriptives, cross-region index, ERGM fits"};
    app.name("costar");
    app.require_subcommand(1);
    app.set_version_flag("--version", COSTAR_VERSION);

    struct Shared {
        std::string stars, works, cast, regions, periods, out;
        std::optional<int> from, to, window;
        std::uint64_t seed = 0;
        unsigned workers = 1;
        bool timings = false;
    };
    Shared shared;
    std::size_t replicates = 100;
    double swap_mult = 2.0;
    bool svg = false;
    std::string terms_file, summary_term = report::kHomophilyTerm;
    report::SubgroupSpec subgroup_spec;
    report::ClusteringKind clustering = report::ClusteringKind::MeanLocal;

    auto add_shared = [&](CLI::App* sub) {
        sub->add_option("--stars", shared.stars, "stars.csv")->required();
        sub->add_option("--works", shared.works, "works.csv")->required();
        sub->add_option("--cast", shared.cast, "cast.csv")->required();
        sub->add_option("--regions", shared.regions, "Comma-separated regions, e.g. Mainland,HongKong");
        auto* from = sub->add_option("--from", shared.from, "First year of the schedule");
        auto* to = sub->add_option("--to", shared.to, "Last year of the schedule");
        auto* window = sub->add_option("--window", shared.window, "Years per period");
        auto* periods = sub->add_option("--periods", shared.periods, "JSON list of periods");
        periods->excludes(from)->excludes(to)->excludes(window);
        sub->add_option("--seed", shared.seed, "Run seed");
        sub->add_option("--out", shared.out, "Output directory")->required();
        sub->add_option("--workers", shared.workers, "Worker threads (does not affect results)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--timings", shared.timings, "Record wall time in manifest.json");
    };

    auto* describe = app.add_subcommand("describe", "Per-period network summary");
    add_shared(describe);
    describe->add_option("--clustering", clustering, "Clustering coefficient: local (mean of local) or global")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, report::ClusteringKind>{{"local", report::ClusteringKind::MeanLocal},
                                                          {"global", report::ClusteringKind::Transitivity}}));
    auto* index = app.add_subcommand("index", "Cross-region cooperation index against a swap null");
    add_shared(index);
    index->add_option("--replicates", replicates, "Null-model replicates per period");
    index->add_option("--swap-mult", swap_mult, "Swap attempts per edge");
    index->add_flag("--svg", svg, "Also write index.svg");
    auto* ergm_cmd = app.add_subcommand("ergm", "Dyad-independent ERGM per period");
    add_shared(ergm_cmd);
    ergm_cmd->add_option("--terms", terms_file, "JSON term list (default: full model)");
    ergm_cmd->add_option("--summary-term", summary_term, "Term for coefficients.csv");
    auto* subgroups = app.add_subcommand("subgroups", "Cross-region cooperation by subgroup");
    add_shared(subgroups);
    for (auto* sub : {ergm_cmd, subgroups}) {
        sub->add_option("--fame-quantile", subgroup_spec.fame_quantile, "Fame quantile");
        sub->add_option("--generation-cutoff", subgroup_spec.generation_cutoff,
                        "First year of the newer generation");
        sub->add_option("--popularity", subgroup_spec.popularity,
                        "Lagged cooperation count: events (co-starring events) or partners")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, PopularityMeasure>{{"events", PopularityMeasure::Events},
                                                         {"partners", PopularityMeasure::Partners}}));
    }

    std::vector<std::string> argv_store = {"costar"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const auto started = std::chrono::steady_clock::now();
    try {
        RunConfig c;
        c.command = app.get_subcommands().front()->get_name();
        c.stars = shared.stars;
        c.works = shared.works;
        c.cast = shared.cast;
        c.out = shared.out;
        c.seed = shared.seed;
        c.workers = shared.workers;
        c.timings = shared.timings;

        const bool three = c.command == "describe";
        if (shared.regions.empty()) {
            c.regions = three ? std::vector<Region>{Region::Mainland, Region::HongKong, Region::Taiwan}
                              : std::vector<Region>{Region::Mainland, Region::HongKong};
        } else {
            auto parsed = parse_region_list(shared.regions);
            if (!parsed) throw ConfigError("--regions: unknown region in '" + shared.regions + "'");
            c.regions = *parsed;
        }

        if (!shared.periods.empty()) {
            c.schedule = parse_periods(read_json(shared.periods, "periods"));
        } else {
            const bool yearly = c.command == "index";
            const int from = shared.from.value_or(1990);
            const int to = shared.to.value_or(yearly ? 2014 : 2009);
            c.schedule = make_schedule(from, to, shared.window.value_or(yearly ? 1 : 4));
        }

        c.replicates = replicates;
        c.swap_multiplier = swap_mult;
        c.svg = svg;
        c.terms = terms_file.empty() ? ergm::default_term_requests()
                                     : ergm::parse_term_requests(read_json(terms_file, "terms"));
        c.summary_term = summary_term;
        c.subgroups = subgroup_spec;
        c.clustering = clustering;

        const auto written = execute(c);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        auto manifest = read_json(c.out / "manifest.json", "manifest");
        if (const auto dups = manifest["duplicate_cast_rows"].get<std::size_t>(); dups > 0) {
            err << "warning: " << dups << " duplicate cast rows dropped\n";
        }
        if (c.timings) {
            manifest["wall_time_seconds"] = seconds;
            write_text(c.out / "manifest.json", dump(manifest));
        }
        std::ostringstream msg;
        msg << "costar " << c.command << ": wrote " << written.size() << " files to "
            << c.out.string() << " in " << std::fixed << std::setprecision(2) << seconds << " s\n";
        err << msg.str();
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace costar::cli
