#include "costar/region.hpp"

namespace costar {

std::string_view to_string(Region r) noexcept {
    switch (r) {
        case Region::Mainland: return "Mainland";
        case Region::HongKong: return "HongKong";
        case Region::Taiwan: return "Taiwan";
        case Region::Other: return "Other";
    }
    return "Other";
}

std::optional<Region> parse_region(std::string_view label) noexcept {
    for (Region r : kAllRegions) {
        if (to_string(r) == label) return r;
    }
    return std::nullopt;
}

std::vector<Region> RegionSet::members() const {
    std::vector<Region> out;
    for (Region r : kAllRegions) {
        if (contains(r)) out.push_back(r);
    }
    return out;
}

std::string RegionSet::to_string() const {
    std::string out;
    for (Region r : members()) {
        if (!out.empty()) out += ',';
        out += costar::to_string(r);
    }
    return out;
}

std::optional<std::vector<Region>> parse_region_list(std::string_view text) {
    std::vector<Region> out;
    while (true) {
        auto comma = text.find(',');
        auto item = text.substr(0, comma);
        auto r = parse_region(item);
        if (!r) return std::nullopt;
        out.push_back(*r);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace costar
