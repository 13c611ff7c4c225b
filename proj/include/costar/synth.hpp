#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "costar/graph.hpp"
#include "costar/ingest.hpp"

namespace costar::synth {

struct RawDataset {
    std::vector<StarRecord> stars;
    std::vector<WorkRecord> works;
    std::vector<CastRecord> cast;
};

struct FixtureOptions {
    std::size_t stars = 500;
    int first_year = 1985;
    int last_year = 2014;
    std::size_t works_per_year = 40;
    double mainland_share = 0.60;
    double hongkong_share = 0.25;  // remainder Taiwan
    // Probability that a supporting cast member is drawn from the lead's region.
    double same_region_bias = 0.7;
    std::uint64_t seed = 20240501;
};

// Star/work/cast tables with regional homophily, staggered careers and
// 2-6 person casts. Deterministic in `options.seed`.
RawDataset make_fixture(const FixtureOptions& options = {});

// One two-person work in `year` per edge of g (weights repeat the work), and
// a solo work for every isolated node so that it survives projection. Star
// ids are "S0000".., keyed by node index.
RawDataset from_network(const CollabNetwork& g, int year);

Dataset to_dataset(const RawDataset& raw);

// Writes stars.csv, works.csv and cast.csv into `dir` (created if needed).
void write_dataset(const RawDataset& raw, const std::filesystem::path& dir);

}  // namespace costar::synth
