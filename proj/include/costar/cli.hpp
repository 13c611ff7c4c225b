#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "costar/ergm.hpp"
#include "costar/graph.hpp"
#include "costar/report.hpp"

namespace costar::cli {

struct RunConfig {
    std::string command;
    std::filesystem::path stars;
    std::filesystem::path works;
    std::filesystem::path cast;
    std::vector<Region> regions;
    std::vector<PeriodSpec> schedule;
    std::size_t replicates = 100;
    double swap_multiplier = 2.0;
    bool svg = false;
    std::vector<ergm::TermRequest> terms;
    std::string summary_term = report::kHomophilyTerm;
    report::SubgroupSpec subgroups;
    report::ClusteringKind clustering = report::ClusteringKind::MeanLocal;
    std::uint64_t seed = 0;
    std::filesystem::path out;
    // Not part of the echoed configuration: results do not depend on them.
    unsigned workers = 1;
    bool timings = false;

    // Throws ConfigError.
    void validate() const;
};

// Echo written to config.json and the manifest. The output directory, worker
// count and timing switch are left out so that output trees of equal runs
// compare byte for byte wherever they are written.
nlohmann::json to_json(const RunConfig& config);

// Parses `[{"label": "1990-1993", "start": 1990, "end": 1993}, ...]`; label
// defaults to the usual "start-end" form. Throws ConfigError.
std::vector<PeriodSpec> parse_periods(const nlohmann::json& doc);

// Runs the command in `config` and writes its outputs into config.out.
// Returns the relative paths written, sorted.
std::vector<std::string> execute(const RunConfig& config);

// Full command line, argv[0] excluded. Returns the process exit code:
// 0 ok, 2 configuration error, 3 data error, 4 numeric failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace costar::cli
