#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "costar/ergm.hpp"
#include "costar/graph.hpp"
#include "costar/ingest.hpp"
#include "costar/null_model.hpp"

namespace costar::report {

struct PeriodSummary {
    std::string label;
    std::size_t stars = 0;
    // Percentage of nodes per included region, in RegionSet order.
    std::vector<std::pair<Region, double>> region_share;
    std::size_t edges = 0;
    double average_degree = 0.0;
    double clustering = 0.0;

    friend bool operator==(const PeriodSummary&, const PeriodSummary&) = default;
};

// Throws UndefinedInputError on a network without nodes.
enum class ClusteringKind {
    MeanLocal,
    // Global transitivity: 3 x triangles / connected triples.
    Transitivity,
};

PeriodSummary describe(const CollabNetwork& g, RegionSet included = RegionSet::all(),
                       ClusteringKind clustering = ClusteringKind::MeanLocal);

// All-zero summary for a period without works.
PeriodSummary empty_summary(const PeriodSpec& period, RegionSet included);

void write_period_summaries(std::span<const PeriodSummary> rows, RegionSet included,
                            const std::filesystem::path& path);
std::vector<PeriodSummary> read_period_summaries(const std::filesystem::path& path);

struct SubgroupSpec {
    // Stars at or above this quantile of lagged cooperation count within
    // their region and period (and with a nonzero count) are "famous".
    double fame_quantile = 0.75;
    // first_work_year strictly before this year is "older generation".
    int generation_cutoff = 1990;
    // What "lagged cooperation count" counts.
    PopularityMeasure popularity = PopularityMeasure::Events;

    void validate() const;
};

enum class Subgroup { All = 0, Famous, LessFamous, Older, Newer };
inline constexpr std::array<Subgroup, 5> kSubgroups = {Subgroup::All, Subgroup::Famous,
                                                       Subgroup::LessFamous, Subgroup::Older,
                                                       Subgroup::Newer};
std::string_view to_string(Subgroup s) noexcept;

struct CrossCoopCell {
    std::size_t stars = 0;
    // Sum over the cell's stars of co-starring events with the other side.
    long long total = 0;

    // Per-star mean; nullopt for an empty cell.
    std::optional<double> mean() const {
        if (stars == 0) return std::nullopt;
        return static_cast<double>(total) / static_cast<double>(stars);
    }
    friend bool operator==(const CrossCoopCell&, const CrossCoopCell&) = default;
};

struct CrossCoopRow {
    std::string label;
    // [subgroup][side], side 0 = first region, side 1 = second region.
    std::array<std::array<CrossCoopCell, 2>, 5> cells{};

    const CrossCoopCell& cell(Subgroup s, int side) const {
        return cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(side)];
    }
    CrossCoopCell& cell(Subgroup s, int side) {
        return cells[static_cast<std::size_t>(s)][static_cast<std::size_t>(side)];
    }
    friend bool operator==(const CrossCoopRow&, const CrossCoopRow&) = default;
};

struct CrossCoopTable {
    Region first = Region::Mainland;
    Region second = Region::HongKong;
    std::vector<CrossCoopRow> periods;
    // Cell-wise sums of the period rows.
    CrossCoopRow total;

    friend bool operator==(const CrossCoopTable&, const CrossCoopTable&) = default;
};

// Per-period, per-subgroup mean number of cross-region co-starring events for
// stars of each region. A period missing either region yields an all-empty
// row; fame subgroups are empty for the schedule's first period (no lag).
CrossCoopTable cross_coop_table(const Dataset& ds, std::span<const PeriodSpec> schedule,
                                Region first, Region second, const SubgroupSpec& spec = {});

// Columns: period, then <subgroup>_<region>_mean and <subgroup>_<region>_stars
// for every subgroup and side; last row "Total". Empty cells are blank.
void write_cross_coop_table(const CrossCoopTable& table, const std::filesystem::path& path);
CrossCoopTable read_cross_coop_table(const std::filesystem::path& path);

// Columns: period,observed,expected,ratio,ci_low,ci_high.
void export_index_trend(std::span<const IndexResult> results, const std::filesystem::path& path);
std::vector<IndexResult> read_index_trend(const std::filesystem::path& path);

struct IndexSeries {
    std::string name;
    std::vector<IndexResult> results;
};

// Static SVG 1.1 line chart: one polyline per series over the period labels,
// y axis from 0 to 1.1 x the largest ratio.
void write_index_svg(std::span<const IndexSeries> series, const std::filesystem::path& path);

struct CoefficientRow {
    std::string period;
    double coefficient = 0.0;
    double se = 0.0;
    friend bool operator==(const CoefficientRow&, const CoefficientRow&) = default;
};

inline constexpr const char* kHomophilyTerm = "nodematch.region";

// Rows of (period, coefficient, se) for `term`, in the given order. Throws
// SpecificationError naming the first period whose fit lacks the term.
std::vector<CoefficientRow> coefficient_summary(
    std::span<const std::pair<std::string, ergm::ErgmFit>> fits, const std::string& term);

void export_coefficient_summary(std::span<const std::pair<std::string, ergm::ErgmFit>> fits,
                                const std::string& term, const std::filesystem::path& path);
std::vector<CoefficientRow> read_coefficient_summary(const std::filesystem::path& path);

}  // namespace costar::report
