#include "costar/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <unordered_set>

#include "costar/csv.hpp"
#include "costar/error.hpp"

namespace costar {

std::string_view to_string(WorkKind kind) noexcept {
    return kind == WorkKind::Movie ? "movie" : "tv";
}

namespace {

// "path:line: msg" when both are known, "msg (line N)" for in-memory records.
DataError record_error(const std::string& source, std::size_t line, const std::string& msg) {
    if (!source.empty() && line) {
        return DataError(source + ":" + std::to_string(line) + ": " + msg);
    }
    if (line) return DataError(msg + " (line " + std::to_string(line) + ")");
    return DataError(msg);
}

}  // namespace

Dataset::Dataset(std::vector<StarRecord> stars, std::vector<WorkRecord> works,
                 std::vector<CastRecord> cast, LoadOptions options,
                 const DatasetSources& sources)
    : stars_(std::move(stars)), works_(std::move(works)) {
    for (std::size_t i = 0; i < stars_.size(); ++i) {
        const auto& s = stars_[i];
        if (s.star_id.empty()) throw record_error(sources.stars, s.line, "empty star_id");
        if (!star_by_id_.emplace(s.star_id, i).second) {
            throw record_error(sources.stars, s.line, "duplicate star_id '" + s.star_id + "'");
        }
    }
    for (std::size_t i = 0; i < works_.size(); ++i) {
        const auto& w = works_[i];
        if (w.work_id.empty()) throw record_error(sources.works, w.line, "empty work_id");
        if (!work_by_id_.emplace(w.work_id, i).second) {
            throw record_error(sources.works, w.line, "duplicate work_id '" + w.work_id + "'");
        }
        if (w.year < kMinYear || w.year > kMaxYear) {
            throw record_error(sources.works, w.line,
                               "work '" + w.work_id + "' year " + std::to_string(w.year) +
                                   " outside [1900, 2100]");
        }
    }

    cast_by_work_.resize(works_.size());
    std::unordered_set<std::uint64_t> seen;
    for (auto& row : cast) {
        auto w = work_index(row.work_id);
        if (!w) {
            throw record_error(sources.cast, row.line,
                               "cast row references unknown work_id '" + row.work_id + "'");
        }
        auto s = star_index(row.star_id);
        if (!s) {
            throw record_error(sources.cast, row.line,
                               "cast row references unknown star_id '" + row.star_id + "'");
        }
        const std::uint64_t key = (static_cast<std::uint64_t>(*w) << 32) | *s;
        if (!seen.insert(key).second) {
            ++duplicate_cast_rows_;
            continue;
        }
        cast_by_work_[*w].push_back(*s);
        cast_.push_back(std::move(row));
    }
    for (std::size_t w = 0; w < works_.size(); ++w) {
        if (cast_by_work_[w].size() > options.max_cast_size) {
            throw record_error(sources.works, works_[w].line,
                               "work '" + works_[w].work_id + "' lists " +
                                   std::to_string(cast_by_work_[w].size()) +
                                   " cast members (limit " +
                                   std::to_string(options.max_cast_size) + ")");
        }
    }

    std::vector<std::optional<int>> earliest(stars_.size());
    for (std::size_t w = 0; w < works_.size(); ++w) {
        for (auto s : cast_by_work_[w]) {
            if (!earliest[s] || works_[w].year < *earliest[s]) earliest[s] = works_[w].year;
        }
    }
    first_year_.resize(stars_.size());
    for (std::size_t i = 0; i < stars_.size(); ++i) {
        const auto& s = stars_[i];
        if (s.first_work_year && earliest[i] && *s.first_work_year > *earliest[i]) {
            throw record_error(sources.stars, s.line,
                               "star '" + s.star_id + "' first_work_year " +
                                   std::to_string(*s.first_work_year) + " is after a work from " +
                                   std::to_string(*earliest[i]));
        }
        first_year_[i] = s.first_work_year ? s.first_work_year : earliest[i];
        if (s.birth_year && first_year_[i] && *s.birth_year >= *first_year_[i]) {
            throw record_error(sources.stars, s.line,
                               "star '" + s.star_id + "' birth_year " +
                                   std::to_string(*s.birth_year) +
                                   " is not before first appearance " +
                                   std::to_string(*first_year_[i]));
        }
    }
}

std::optional<std::size_t> Dataset::star_index(std::string_view star_id) const {
    auto it = star_by_id_.find(std::string(star_id));
    if (it == star_by_id_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Dataset::work_index(std::string_view work_id) const {
    auto it = work_by_id_.find(std::string(work_id));
    if (it == work_by_id_.end()) return std::nullopt;
    return it->second;
}

namespace {

struct Table {
    std::string path;
    std::vector<csv::Record> rows;  // without header
};

Table read_table(const std::filesystem::path& path, const std::vector<std::string>& header) {
    auto records = csv::read_file(path);
    const auto name = path.string();
    if (records.empty()) throw DataError(name + ": missing header");
    auto got = records.front().fields;
    for (auto& f : got) {
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
    }
    if (got != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw DataError(name + ":" + std::to_string(records.front().line) +
                        ": expected header " + expected);
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].fields.size() != header.size()) {
            throw DataError(name + ":" + std::to_string(records[i].line) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(records[i].fields.size()));
        }
    }
    records.erase(records.begin());
    return {name, std::move(records)};
}

std::optional<int> parse_year(const std::string& text, const std::string& path,
                              const csv::Record& row, const char* column) {
    if (text.empty()) return std::nullopt;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(path + ":" + std::to_string(row.line) + ": malformed " + column + " '" +
                        text + "'");
    }
    return value;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& stars_path,
                     const std::filesystem::path& works_path,
                     const std::filesystem::path& cast_path, LoadOptions options) {
    auto star_table =
        read_table(stars_path, {"star_id", "name", "region", "birth_year", "first_work_year"});
    auto work_table = read_table(works_path, {"work_id", "title", "year", "kind"});
    auto cast_table = read_table(cast_path, {"work_id", "star_id"});

    std::vector<StarRecord> stars;
    stars.reserve(star_table.rows.size());
    for (const auto& row : star_table.rows) {
        const auto& f = row.fields;
        auto region = parse_region(f[2]);
        if (!region) {
            throw DataError(star_table.path + ":" + std::to_string(row.line) +
                            ": unknown region label '" + f[2] + "'");
        }
        stars.push_back({f[0], f[1], *region, parse_year(f[3], star_table.path, row, "birth_year"),
                         parse_year(f[4], star_table.path, row, "first_work_year"), row.line});
    }

    std::vector<WorkRecord> works;
    works.reserve(work_table.rows.size());
    for (const auto& row : work_table.rows) {
        const auto& f = row.fields;
        auto year = parse_year(f[2], work_table.path, row, "year");
        if (!year) {
            throw DataError(work_table.path + ":" + std::to_string(row.line) + ": missing year");
        }
        WorkKind kind;
        if (f[3] == "movie") {
            kind = WorkKind::Movie;
        } else if (f[3] == "tv") {
            kind = WorkKind::Tv;
        } else {
            throw DataError(work_table.path + ":" + std::to_string(row.line) +
                            ": unknown work kind '" + f[3] + "'");
        }
        works.push_back({f[0], f[1], *year, kind, row.line});
    }

    std::vector<CastRecord> cast;
    cast.reserve(cast_table.rows.size());
    for (const auto& row : cast_table.rows) {
        cast.push_back({row.fields[0], row.fields[1], row.line});
    }

    return Dataset(std::move(stars), std::move(works), std::move(cast), options,
                   {star_table.path, work_table.path, cast_table.path});
}

std::vector<PeriodSpec> make_schedule(int from, int to, int window) {
    if (window < 1) throw ConfigError("window must be >= 1");
    if (from > to) throw ConfigError("--from must not exceed --to");
    std::vector<PeriodSpec> out;
    for (int start = from; start <= to; start += window) {
        const int end = std::min(to, start + window - 1);
        auto label = start == end ? std::to_string(start)
                                  : std::to_string(start) + "-" + std::to_string(end);
        out.push_back({std::move(label), start, end});
    }
    return out;
}

void validate_schedule(std::span<const PeriodSpec> schedule) {
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        const auto& p = schedule[i];
        if (p.start_year > p.end_year) {
            throw ConfigError("period '" + p.label + "' starts after it ends");
        }
        if (i > 0 && schedule[i - 1].end_year >= p.start_year) {
            throw ConfigError("periods '" + schedule[i - 1].label + "' and '" + p.label +
                              "' overlap or are out of order");
        }
    }
}

PeriodSpec preceding_period(const PeriodSpec& p) {
    const int end = p.start_year - 1;
    const int start = end - p.length() + 1;
    auto label = start == end ? std::to_string(start)
                              : std::to_string(start) + "-" + std::to_string(end);
    return {std::move(label), start, end};
}

namespace {

// Per-star lag summary of one period over all regions.
struct LagSummary {
    std::vector<int> events;
    std::vector<int> partners;
    std::vector<bool> crossed;
};

LagSummary summarize_period(const Dataset& ds, const PeriodSpec& p) {
    const auto n = ds.stars().size();
    LagSummary out{std::vector<int>(n, 0), std::vector<int>(n, 0), std::vector<bool>(n, false)};
    std::map<std::pair<std::size_t, std::size_t>, int> pair_weight;
    for (std::size_t w = 0; w < ds.works().size(); ++w) {
        if (!p.contains(ds.works()[w].year)) continue;
        auto cast = ds.cast_of(w);
        for (std::size_t a = 0; a < cast.size(); ++a) {
            for (std::size_t b = a + 1; b < cast.size(); ++b) {
                auto key = std::minmax(cast[a], cast[b]);
                ++pair_weight[{key.first, key.second}];
            }
        }
    }
    for (const auto& [pair, weight] : pair_weight) {
        const auto [s, t] = pair;
        out.events[s] += weight;
        out.events[t] += weight;
        ++out.partners[s];
        ++out.partners[t];
        if (ds.stars()[s].region != ds.stars()[t].region) {
            out.crossed[s] = true;
            out.crossed[t] = true;
        }
    }
    return out;
}

}  // namespace

std::vector<PeriodAttributes> derive_attributes(const Dataset& ds,
                                                std::span<const PeriodSpec> schedule,
                                                PopularityMeasure measure) {
    validate_schedule(schedule);
    const auto n = ds.stars().size();
    std::vector<PeriodAttributes> out;
    out.reserve(schedule.size());
    std::optional<LagSummary> previous;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        PeriodAttributes pa{schedule[k], k == 0, std::vector<NodeAttributes>(n)};
        for (std::size_t s = 0; s < n; ++s) {
            auto& node = pa.by_star[s];
            node.region = ds.stars()[s].region;
            node.birth_year = ds.stars()[s].birth_year;
            node.first_work_year = ds.first_work_year(s).value_or(0);
            if (previous) {
                node.prev_cooperation_count = measure == PopularityMeasure::Events
                                                  ? previous->events[s]
                                                  : previous->partners[s];
                node.prev_cross_region = previous->crossed[s];
            }
        }
        out.push_back(std::move(pa));
        previous = summarize_period(ds, schedule[k]);
    }
    return out;
}

CollabNetwork project(const Dataset& ds, const PeriodSpec& period, RegionSet regions,
                      const PeriodAttributes* attributes) {
    if (regions.empty()) throw PreconditionError("project: empty region set");
    if (attributes && attributes->by_star.size() != ds.stars().size()) {
        throw PreconditionError("project: attribute table does not match the dataset");
    }
    const auto& stars = ds.stars();
    std::vector<bool> present(stars.size(), false);
    std::map<std::pair<std::size_t, std::size_t>, int> pair_weight;
    std::vector<std::size_t> members;
    for (std::size_t w = 0; w < ds.works().size(); ++w) {
        if (!period.contains(ds.works()[w].year)) continue;
        members.clear();
        for (auto s : ds.cast_of(w)) {
            if (regions.contains(stars[s].region)) members.push_back(s);
        }
        std::sort(members.begin(), members.end());
        for (std::size_t a = 0; a < members.size(); ++a) {
            present[members[a]] = true;
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                ++pair_weight[{members[a], members[b]}];
            }
        }
    }

    std::vector<std::uint32_t> node_of(stars.size(), 0);
    std::vector<NodeAttributes> nodes;
    std::vector<std::string> keys;
    for (std::size_t s = 0; s < stars.size(); ++s) {
        if (!present[s]) continue;
        node_of[s] = static_cast<std::uint32_t>(nodes.size());
        NodeAttributes node;
        if (attributes) {
            node = attributes->by_star[s];
        } else {
            node.region = stars[s].region;
            node.birth_year = stars[s].birth_year;
            node.first_work_year = ds.first_work_year(s).value_or(0);
        }
        nodes.push_back(node);
        keys.push_back(stars[s].star_id);
    }

    std::vector<WeightedEdge> edges;
    edges.reserve(pair_weight.size());
    for (const auto& [pair, weight] : pair_weight) {
        edges.push_back({Edge{NodeId{node_of[pair.first]}, NodeId{node_of[pair.second]}}, weight});
    }
    return CollabNetwork(period, std::move(nodes), std::move(edges), std::move(keys));
}

std::string age_group(const NodeAttributes& node, const PeriodSpec& period) {
    if (!node.birth_year) return "unknown";
    const int age = period.midpoint_year() - *node.birth_year;
    if (age < 20) return "under20";
    if (age < 40) return "20-39";
    if (age < 60) return "40-59";
    return "over60";
}

std::string entry_cohort(int first_work_year) {
    if (first_work_year < 1980) return "before1980";
    const int start = 1980 + (first_work_year - 1980) / 5 * 5;
    return std::to_string(start) + "-" + std::to_string(start + 4);
}

}  // namespace costar
