#include "costar/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "costar/csv.hpp"
#include "costar/error.hpp"
#include "costar/rng.hpp"

namespace costar::synth {

namespace {

std::string padded(char prefix, std::size_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, value);
    return buf;
}

std::string optional_year(const std::optional<int>& y) {
    return y ? std::to_string(*y) : std::string();
}

}  // namespace

RawDataset make_fixture(const FixtureOptions& o) {
    auto rng = make_rng(o.seed, 0);
    RawDataset raw;

    std::vector<int> career_start(o.stars), career_end(o.stars);
    for (std::size_t s = 0; s < o.stars; ++s) {
        const double u = uniform_unit(rng);
        const Region region = u < o.mainland_share                     ? Region::Mainland
                              : u < o.mainland_share + o.hongkong_share ? Region::HongKong
                                                                        : Region::Taiwan;
        const int start = 1975 + static_cast<int>(uniform_below(rng, 38));  // 1975..2012
        const int birth = start - 16 - static_cast<int>(uniform_below(rng, 15));
        career_start[s] = start;
        career_end[s] = start + 12 + static_cast<int>(uniform_below(rng, 25));

        StarRecord star;
        star.star_id = padded('S', s, 4);
        // Every seventh name carries a comma to exercise CSV quoting.
        star.name = s % 7 == 3 ? "Lee, Star " + std::to_string(s) : "Star " + std::to_string(s);
        star.region = region;
        if (s % 11 != 5) star.birth_year = birth;
        if (s % 3 == 0) star.first_work_year = start;
        raw.stars.push_back(std::move(star));
    }

    std::size_t work_no = 0;
    std::vector<std::size_t> active, same;
    for (int year = o.first_year; year <= o.last_year; ++year) {
        active.clear();
        for (std::size_t s = 0; s < o.stars; ++s) {
            if (career_start[s] <= year && year <= career_end[s]) active.push_back(s);
        }
        if (active.size() < 2) continue;
        for (std::size_t k = 0; k < o.works_per_year; ++k) {
            WorkRecord work;
            work.work_id = padded('W', work_no++, 5);
            work.title = "Work " + std::to_string(work_no);
            work.year = year;
            work.kind = uniform_unit(rng) < 0.7 ? WorkKind::Movie : WorkKind::Tv;

            const std::size_t lead = active[uniform_below(rng, active.size())];
            same.clear();
            for (auto s : active) {
                if (raw.stars[s].region == raw.stars[lead].region) same.push_back(s);
            }
            std::vector<std::size_t> cast = {lead};
            const std::size_t size =
                std::min<std::size_t>(2 + uniform_below(rng, 5), active.size());
            for (int guard = 0; cast.size() < size && guard < 100; ++guard) {
                const auto& pool = uniform_unit(rng) < o.same_region_bias ? same : active;
                const auto pick = pool[uniform_below(rng, pool.size())];
                if (std::find(cast.begin(), cast.end(), pick) == cast.end()) cast.push_back(pick);
            }
            for (auto s : cast) raw.cast.push_back({work.work_id, raw.stars[s].star_id, 0});
            raw.works.push_back(std::move(work));
        }
    }

    // Stars never cast have no first work year to contradict.
    for (std::size_t s = 0; s < o.stars; ++s) {
        if (!raw.stars[s].first_work_year) continue;
        int earliest = kMaxYear + 1;
        for (const auto& c : raw.cast) {
            if (c.star_id != raw.stars[s].star_id) continue;
            const auto idx = std::stoul(c.work_id.substr(1));
            earliest = std::min(earliest, raw.works[idx].year);
        }
        if (earliest <= kMaxYear) {
            raw.stars[s].first_work_year = std::min(*raw.stars[s].first_work_year, earliest);
        }
    }
    return raw;
}

RawDataset from_network(const CollabNetwork& g, int year) {
    RawDataset raw;
    for (std::uint32_t v = 0; v < g.node_count(); ++v) {
        const auto& a = g.attributes(NodeId{v});
        StarRecord star;
        star.star_id = padded('S', v, 4);
        star.name = "Star " + std::to_string(v);
        star.region = a.region;
        star.birth_year = a.birth_year;
        if (a.first_work_year > 0 && a.first_work_year <= year) star.first_work_year = a.first_work_year;
        raw.stars.push_back(std::move(star));
    }
    std::size_t work_no = 0;
    auto add_work = [&](std::initializer_list<std::uint32_t> members) {
        WorkRecord work;
        work.work_id = padded('W', work_no++, 6);
        work.title = "Work " + std::to_string(work_no);
        work.year = year;
        for (auto m : members) raw.cast.push_back({work.work_id, raw.stars[m].star_id, 0});
        raw.works.push_back(std::move(work));
    };
    for (const auto& e : g.edges()) {
        for (int w = 0; w < e.weight; ++w) add_work({e.edge.u.value, e.edge.v.value});
    }
    for (std::uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.degree(NodeId{v}) == 0) add_work({v});
    }
    return raw;
}

Dataset to_dataset(const RawDataset& raw) { return Dataset(raw.stars, raw.works, raw.cast); }

void write_dataset(const RawDataset& raw, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream os(dir / name, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot write " + (dir / name).string());
        return os;
    };
    {
        auto os = open("stars.csv");
        csv::write_row(os, {"star_id", "name", "region", "birth_year", "first_work_year"});
        for (const auto& s : raw.stars) {
            csv::write_row(os, {s.star_id, s.name, std::string(to_string(s.region)),
                                optional_year(s.birth_year), optional_year(s.first_work_year)});
        }
    }
    {
        auto os = open("works.csv");
        csv::write_row(os, {"work_id", "title", "year", "kind"});
        for (const auto& w : raw.works) {
            csv::write_row(os, {w.work_id, w.title, std::to_string(w.year), std::string(to_string(w.kind))});
        }
    }
    {
        auto os = open("cast.csv");
        csv::write_row(os, {"work_id", "star_id"});
        for (const auto& c : raw.cast) csv::write_row(os, {c.work_id, c.star_id});
    }
}

}  // namespace costar::synth
