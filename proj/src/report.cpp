#include "costar/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "costar/csv.hpp"
#include "costar/error.hpp"

namespace costar::report {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + path.string());
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw ConfigError("failed writing " + path.string());
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(where + ": not a number '" + text + "'");
    }
    return v;
}

long long parse_int(const std::string& text, const std::string& where) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw DataError(where + ": not an integer '" + text + "'");
    }
    return v;
}

std::string where(const std::filesystem::path& path, const csv::Record& r) {
    return path.string() + ":" + std::to_string(r.line);
}

std::vector<csv::Record> read_with_header(const std::filesystem::path& path,
                                          std::vector<std::string>& header) {
    auto records = csv::read_file(path);
    if (records.empty()) throw DataError(path.string() + ": missing header");
    header = records.front().fields;
    records.erase(records.begin());
    for (const auto& r : records) {
        if (r.fields.size() != header.size()) {
            throw DataError(where(path, r) + ": expected " + std::to_string(header.size()) +
                            " fields");
        }
    }
    return records;
}

}  // namespace

PeriodSummary describe(const CollabNetwork& g, RegionSet included, ClusteringKind clustering) {
    if (g.empty()) throw UndefinedInputError("describe: network '" + g.period().label + "' is empty");
    PeriodSummary s;
    s.label = g.period().label;
    s.stars = g.node_count();
    s.edges = g.edge_count();
    s.average_degree = average_degree(g);
    s.clustering = clustering == ClusteringKind::MeanLocal ? average_clustering(g) : transitivity(g);
    for (Region r : included.members()) {
        std::size_t count = 0;
        for (const auto& node : g.nodes()) count += node.region == r ? 1 : 0;
        s.region_share.emplace_back(
            r, 100.0 * static_cast<double>(count) / static_cast<double>(g.node_count()));
    }
    return s;
}

PeriodSummary empty_summary(const PeriodSpec& period, RegionSet included) {
    PeriodSummary s;
    s.label = period.label;
    for (Region r : included.members()) s.region_share.emplace_back(r, 0.0);
    return s;
}

void write_period_summaries(std::span<const PeriodSummary> rows, RegionSet included,
                            const std::filesystem::path& path) {
    auto os = open_output(path);
    std::vector<std::string> header = {"period", "stars"};
    for (Region r : included.members()) header.push_back("share_" + std::string(to_string(r)));
    header.insert(header.end(), {"edges", "average_degree", "clustering"});
    csv::write_row(os, header);
    for (const auto& s : rows) {
        std::vector<std::string> row = {s.label, std::to_string(s.stars)};
        for (Region r : included.members()) {
            auto it = std::find_if(s.region_share.begin(), s.region_share.end(),
                                   [&](const auto& p) { return p.first == r; });
            row.push_back(csv::format_double(it == s.region_share.end() ? 0.0 : it->second));
        }
        row.push_back(std::to_string(s.edges));
        row.push_back(csv::format_double(s.average_degree));
        row.push_back(csv::format_double(s.clustering));
        csv::write_row(os, row);
    }
    finish(os, path);
}

std::vector<PeriodSummary> read_period_summaries(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto records = read_with_header(path, header);
    if (header.size() < 5 || header[0] != "period") throw DataError(path.string() + ": bad header");
    std::vector<Region> regions;
    for (std::size_t c = 2; c + 3 < header.size(); ++c) {
        auto r = parse_region(std::string_view(header[c]).substr(6));
        if (!header[c].starts_with("share_") || !r) {
            throw DataError(path.string() + ": bad column '" + header[c] + "'");
        }
        regions.push_back(*r);
    }
    std::vector<PeriodSummary> out;
    for (const auto& rec : records) {
        const auto& f = rec.fields;
        const auto w = where(path, rec);
        PeriodSummary s;
        s.label = f[0];
        s.stars = static_cast<std::size_t>(parse_int(f[1], w));
        for (std::size_t i = 0; i < regions.size(); ++i) {
            s.region_share.emplace_back(regions[i], parse_double(f[2 + i], w));
        }
        const auto base = 2 + regions.size();
        s.edges = static_cast<std::size_t>(parse_int(f[base], w));
        s.average_degree = parse_double(f[base + 1], w);
        s.clustering = parse_double(f[base + 2], w);
        out.push_back(std::move(s));
    }
    return out;
}

void SubgroupSpec::validate() const {
    if (!(fame_quantile >= 0.0 && fame_quantile <= 1.0)) {
        throw ConfigError("fame quantile must lie in [0, 1]");
    }
}

std::string_view to_string(Subgroup s) noexcept {
    switch (s) {
        case Subgroup::All: return "all";
        case Subgroup::Famous: return "famous";
        case Subgroup::LessFamous: return "less_famous";
        case Subgroup::Older: return "older";
        case Subgroup::Newer: return "newer";
    }
    return "all";
}

CrossCoopTable cross_coop_table(const Dataset& ds, std::span<const PeriodSpec> schedule,
                                Region first, Region second, const SubgroupSpec& spec) {
    spec.validate();
    if (first == second) throw PreconditionError("cross-cooperation table needs two regions");
    const auto attrs = derive_attributes(ds, schedule, spec.popularity);
    const std::array<Region, 2> side_region = {first, second};

    CrossCoopTable table;
    table.first = first;
    table.second = second;
    table.total.label = "Total";
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        CrossCoopRow row;
        row.label = schedule[k].label;
        const auto g = project(ds, schedule[k], {first, second}, &attrs[k]);

        std::array<bool, 2> present = {false, false};
        for (const auto& node : g.nodes()) {
            present[0] = present[0] || node.region == first;
            present[1] = present[1] || node.region == second;
        }
        if (!present[0] || !present[1]) {
            table.periods.push_back(std::move(row));
            continue;
        }

        std::array<double, 2> fame_threshold{};
        for (int side = 0; side < 2; ++side) {
            std::vector<double> counts;
            for (const auto& node : g.nodes()) {
                if (node.region == side_region[side]) counts.push_back(node.prev_cooperation_count);
            }
            fame_threshold[side] = percentile(std::move(counts), spec.fame_quantile);
        }

        for (std::uint32_t v = 0; v < g.node_count(); ++v) {
            const auto& node = g.attributes(NodeId{v});
            const int side = node.region == first ? 0 : 1;
            long long cross = 0;
            for (auto u : g.neighbors(NodeId{v})) {
                if (g.attributes(u).region != node.region) cross += g.weight(NodeId{v}, u);
            }
            auto add = [&](Subgroup s) {
                auto& c = row.cell(s, side);
                ++c.stars;
                c.total += cross;
            };
            add(Subgroup::All);
            if (!attrs[k].no_lag) {
                const bool famous = node.prev_cooperation_count > 0 &&
                                    node.prev_cooperation_count >= fame_threshold[side];
                add(famous ? Subgroup::Famous : Subgroup::LessFamous);
            }
            add(node.first_work_year < spec.generation_cutoff ? Subgroup::Older : Subgroup::Newer);
        }
        for (auto s : kSubgroups) {
            for (int side = 0; side < 2; ++side) {
                table.total.cell(s, side).stars += row.cell(s, side).stars;
                table.total.cell(s, side).total += row.cell(s, side).total;
            }
        }
        table.periods.push_back(std::move(row));
    }
    return table;
}

namespace {

std::vector<std::string> cross_coop_header(Region first, Region second) {
    std::vector<std::string> header = {"period"};
    for (auto s : kSubgroups) {
        for (Region r : {first, second}) {
            const auto prefix = std::string(to_string(s)) + "_" + std::string(to_string(r));
            header.push_back(prefix + "_mean");
            header.push_back(prefix + "_stars");
        }
    }
    return header;
}

std::vector<std::string> cross_coop_fields(const CrossCoopRow& row) {
    std::vector<std::string> fields = {row.label};
    for (auto s : kSubgroups) {
        for (int side = 0; side < 2; ++side) {
            const auto& c = row.cell(s, side);
            auto mean = c.mean();
            fields.push_back(mean ? csv::format_double(*mean) : std::string());
            fields.push_back(std::to_string(c.stars));
        }
    }
    return fields;
}

}  // namespace

void write_cross_coop_table(const CrossCoopTable& table, const std::filesystem::path& path) {
    auto os = open_output(path);
    csv::write_row(os, cross_coop_header(table.first, table.second));
    for (const auto& row : table.periods) csv::write_row(os, cross_coop_fields(row));
    csv::write_row(os, cross_coop_fields(table.total));
    finish(os, path);
}

CrossCoopTable read_cross_coop_table(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto records = read_with_header(path, header);
    if (header.size() != 21 || header[0] != "period") throw DataError(path.string() + ": bad header");
    // "all_<first>_mean"
    auto region_of = [&](const std::string& col) {
        auto body = std::string_view(col).substr(4);
        body.remove_suffix(5);
        auto r = parse_region(body);
        if (!r) throw DataError(path.string() + ": bad column '" + col + "'");
        return *r;
    };
    CrossCoopTable table;
    table.first = region_of(header[1]);
    table.second = region_of(header[3]);
    if (header != cross_coop_header(table.first, table.second)) {
        throw DataError(path.string() + ": bad header");
    }
    if (records.empty() || records.back().fields[0] != "Total") {
        throw DataError(path.string() + ": missing Total row");
    }
    for (const auto& rec : records) {
        CrossCoopRow row;
        row.label = rec.fields[0];
        std::size_t c = 1;
        for (auto s : kSubgroups) {
            for (int side = 0; side < 2; ++side) {
                const auto& mean_text = rec.fields[c];
                auto& cell = row.cell(s, side);
                cell.stars = static_cast<std::size_t>(parse_int(rec.fields[c + 1], where(path, rec)));
                if (!mean_text.empty()) {
                    const double mean = parse_double(mean_text, where(path, rec));
                    cell.total = std::llround(mean * static_cast<double>(cell.stars));
                }
                c += 2;
            }
        }
        if (&rec == &records.back()) {
            table.total = std::move(row);
        } else {
            table.periods.push_back(std::move(row));
        }
    }
    return table;
}

void export_index_trend(std::span<const IndexResult> results, const std::filesystem::path& path) {
    auto os = open_output(path);
    csv::write_row(os, {"period", "observed", "expected", "ratio", "ci_low", "ci_high"});
    for (const auto& r : results) {
        csv::write_row(os, {r.period, std::to_string(r.observed), csv::format_double(r.expected),
                            csv::format_double(r.ratio), csv::format_double(r.ci_low),
                            csv::format_double(r.ci_high)});
    }
    finish(os, path);
}

std::vector<IndexResult> read_index_trend(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto records = read_with_header(path, header);
    const std::vector<std::string> expected = {"period", "observed", "expected",
                                               "ratio",  "ci_low",   "ci_high"};
    if (header != expected) throw DataError(path.string() + ": bad header");
    std::vector<IndexResult> out;
    for (const auto& rec : records) {
        const auto w = where(path, rec);
        IndexResult r;
        r.period = rec.fields[0];
        r.observed = static_cast<std::size_t>(parse_int(rec.fields[1], w));
        r.expected = parse_double(rec.fields[2], w);
        r.ratio = parse_double(rec.fields[3], w);
        r.ci_low = parse_double(rec.fields[4], w);
        r.ci_high = parse_double(rec.fields[5], w);
        out.push_back(std::move(r));
    }
    return out;
}

void write_index_svg(std::span<const IndexSeries> series, const std::filesystem::path& path) {
    constexpr double width = 720, height = 400;
    constexpr double left = 60, right = 160, top = 30, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    static const char* colors[] = {"#d62728", "#2ca02c", "#1f77b4", "#ff7f0e", "#9467bd"};

    std::vector<std::string> labels;
    double max_ratio = 0.0;
    for (const auto& s : series) {
        for (const auto& r : s.results) {
            if (std::find(labels.begin(), labels.end(), r.period) == labels.end()) {
                labels.push_back(r.period);
            }
            if (std::isfinite(r.ratio)) max_ratio = std::max(max_ratio, r.ratio);
        }
    }
    const double y_max = max_ratio > 0 ? max_ratio * 1.1 : 1.0;
    auto x_of = [&](std::size_t i) {
        return labels.size() < 2 ? left + plot_w / 2
                                  : left + plot_w * static_cast<double>(i) /
                                               static_cast<double>(labels.size() - 1);
    };
    auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };
    auto num = [](double v) {
        std::ostringstream ss;
        ss.precision(6);
        ss << v;
        return ss.str();
    };

    auto os = open_output(path);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
       << "<title>Cross-region cooperation index</title>\n"
       << "<g id=\"axes\" stroke=\"#000\" stroke-width=\"1\">\n"
       << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
       << top + plot_h << "\"/>\n"
       << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
       << "\" y2=\"" << top + plot_h << "\"/>\n"
       << "</g>\n";
    os << "<g id=\"y-ticks\" font-size=\"11\" text-anchor=\"end\">\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = y_max * t / 4.0;
        os << "<text class=\"y-tick\" x=\"" << left - 6 << "\" y=\"" << num(y_of(v) + 4) << "\">"
           << num(v) << "</text>\n";
    }
    os << "</g>\n<g id=\"x-ticks\" font-size=\"10\" text-anchor=\"middle\">\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        os << "<text class=\"x-tick\" x=\"" << num(x_of(i)) << "\" y=\"" << top + plot_h + 16
           << "\">" << labels[i] << "</text>\n";
    }
    os << "</g>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        os << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (const auto& r : series[s].results) {
            if (!std::isfinite(r.ratio)) continue;
            const auto i = static_cast<std::size_t>(
                std::find(labels.begin(), labels.end(), r.period) - labels.begin());
            os << (first ? "" : " ") << num(x_of(i)) << ',' << num(y_of(r.ratio));
            first = false;
        }
        os << "\"/>\n";
        os << "<text class=\"legend\" x=\"" << left + plot_w + 12 << "\" y=\""
           << top + 16 + 18 * static_cast<double>(s) << "\" fill=\"" << color
           << "\" font-size=\"12\">" << series[s].name << "</text>\n";
    }
    os << "</svg>\n";
    finish(os, path);
}

std::vector<CoefficientRow> coefficient_summary(
    std::span<const std::pair<std::string, ergm::ErgmFit>> fits, const std::string& term) {
    std::vector<CoefficientRow> rows;
    for (const auto& [period, f] : fits) {
        auto idx = f.term_index(term);
        if (!idx) {
            throw SpecificationError("fit for period '" + period + "' has no term '" + term + "'");
        }
        rows.push_back({period, f.theta[*idx], f.se[*idx]});
    }
    return rows;
}

void export_coefficient_summary(std::span<const std::pair<std::string, ergm::ErgmFit>> fits,
                                const std::string& term, const std::filesystem::path& path) {
    const auto rows = coefficient_summary(fits, term);
    auto os = open_output(path);
    csv::write_row(os, {"period", "coefficient", "se"});
    for (const auto& r : rows) {
        csv::write_row(os, {r.period, csv::format_double(r.coefficient), csv::format_double(r.se)});
    }
    finish(os, path);
}

std::vector<CoefficientRow> read_coefficient_summary(const std::filesystem::path& path) {
    std::vector<std::string> header;
    auto records = read_with_header(path, header);
    if (header != std::vector<std::string>{"period", "coefficient", "se"}) {
        throw DataError(path.string() + ": bad header");
    }
    std::vector<CoefficientRow> out;
    for (const auto& rec : records) {
        const auto w = where(path, rec);
        out.push_back({rec.fields[0], parse_double(rec.fields[1], w), parse_double(rec.fields[2], w)});
    }
    return out;
}

}  // namespace costar::report
