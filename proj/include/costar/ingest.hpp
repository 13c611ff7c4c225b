#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "costar/graph.hpp"
#include "costar/region.hpp"

namespace costar {

enum class WorkKind { Movie, Tv };

std::string_view to_string(WorkKind kind) noexcept;

// `line` is the 1-based source line of the record, 0 for records built in
// memory. It only feeds error messages.
struct StarRecord {
    std::string star_id;
    std::string name;
    Region region = Region::Other;
    std::optional<int> birth_year;
    std::optional<int> first_work_year;
    std::size_t line = 0;
};

struct WorkRecord {
    std::string work_id;
    std::string title;
    int year = 0;
    WorkKind kind = WorkKind::Movie;
    std::size_t line = 0;
};

struct CastRecord {
    std::string work_id;
    std::string star_id;
    std::size_t line = 0;
};

struct LoadOptions {
    // Works with more listed cast members than this are rejected.
    std::size_t max_cast_size = 200;
};

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

// File names used to prefix record-level error messages.
struct DatasetSources {
    std::string stars;
    std::string works;
    std::string cast;
};

// Referentially closed star/work/cast collection. Duplicate cast rows are
// dropped and counted; every other inconsistency throws DataError.
class Dataset {
public:
    Dataset(std::vector<StarRecord> stars, std::vector<WorkRecord> works,
            std::vector<CastRecord> cast, LoadOptions options = {},
            const DatasetSources& sources = {});

    std::span<const StarRecord> stars() const { return stars_; }
    std::span<const WorkRecord> works() const { return works_; }
    // Deduplicated, in first-seen order.
    std::span<const CastRecord> cast() const { return cast_; }

    std::optional<std::size_t> star_index(std::string_view star_id) const;
    std::optional<std::size_t> work_index(std::string_view work_id) const;

    // Star indices of a work's cast, in file order.
    std::span<const std::size_t> cast_of(std::size_t work) const { return cast_by_work_[work]; }

    // From the star file when given, else the earliest year among the star's
    // works; nullopt for a star without works or a recorded year.
    std::optional<int> first_work_year(std::size_t star) const { return first_year_[star]; }

    std::size_t duplicate_cast_rows() const { return duplicate_cast_rows_; }

private:
    std::vector<StarRecord> stars_;
    std::vector<WorkRecord> works_;
    std::vector<CastRecord> cast_;
    std::unordered_map<std::string, std::size_t> star_by_id_;
    std::unordered_map<std::string, std::size_t> work_by_id_;
    std::vector<std::vector<std::size_t>> cast_by_work_;
    std::vector<std::optional<int>> first_year_;
    std::size_t duplicate_cast_rows_ = 0;
};

// Reads stars.csv, works.csv and cast.csv (headers documented in README).
// Errors carry the file path and line number.
Dataset load_dataset(const std::filesystem::path& stars_path,
                     const std::filesystem::path& works_path,
                     const std::filesystem::path& cast_path, LoadOptions options = {});

// Consecutive windows of `window` years from `from` to `to`; the last window
// is truncated at `to`. Labels are "1990-1993", or "1990" for one-year
// windows.
std::vector<PeriodSpec> make_schedule(int from, int to, int window);

// Throws ConfigError unless every period has start <= end and the schedule
// is sorted and disjoint.
void validate_schedule(std::span<const PeriodSpec> schedule);

// The window of the same length ending the year before `p` starts.
PeriodSpec preceding_period(const PeriodSpec& p);

enum class PopularityMeasure {
    // Sum of co-starring events (weighted degree).
    Events,
    // Number of distinct co-stars (unweighted degree).
    Partners,
};

struct PeriodAttributes {
    PeriodSpec period;
    // True for the first period of a schedule: lagged fields are 0/false.
    bool no_lag = false;
    // Indexed by dataset star index.
    std::vector<NodeAttributes> by_star;
};

// Node attributes for every star in every period of the schedule, with the
// popularity and cross-region fields lagged by one period.
std::vector<PeriodAttributes> derive_attributes(const Dataset& ds,
                                                std::span<const PeriodSpec> schedule,
                                                PopularityMeasure measure = PopularityMeasure::Events);

// Co-starring network of stars from `regions` over the works released in
// `period`. Nodes are ordered by dataset star index and keyed by star_id;
// edges are sorted and weighted by the number of shared works. Node
// attributes come from `attributes` when given, otherwise lagged fields are
// zero.
CollabNetwork project(const Dataset& ds, const PeriodSpec& period, RegionSet regions,
                      const PeriodAttributes* attributes = nullptr);

// Age at the period midpoint, bucketed: "under20", "20-39", "40-59",
// "over60", or "unknown" without a birth year.
std::string age_group(const NodeAttributes& node, const PeriodSpec& period);

// Career-entry cohort: "before1980", then five-year bins "1980-1984", ...
std::string entry_cohort(int first_work_year);

}  // namespace costar
