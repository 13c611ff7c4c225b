#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace costar {

enum class Region : std::uint8_t { Mainland = 0, HongKong = 1, Taiwan = 2, Other = 3 };

inline constexpr std::array<Region, 4> kAllRegions = {Region::Mainland, Region::HongKong,
                                                      Region::Taiwan, Region::Other};

std::string_view to_string(Region r) noexcept;

// Exact, case-sensitive match against the four canonical labels.
std::optional<Region> parse_region(std::string_view label) noexcept;

class RegionSet {
public:
    constexpr RegionSet() = default;
    constexpr RegionSet(std::initializer_list<Region> regions) {
        for (Region r : regions) insert(r);
    }

    static constexpr RegionSet all() {
        return {Region::Mainland, Region::HongKong, Region::Taiwan, Region::Other};
    }

    constexpr void insert(Region r) { bits_ |= mask(r); }
    constexpr bool contains(Region r) const { return (bits_ & mask(r)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr bool operator==(const RegionSet&) const = default;

    std::vector<Region> members() const;

    // "Mainland,HongKong"; inverse of parse_region_list.
    std::string to_string() const;

private:
    static constexpr std::uint8_t mask(Region r) {
        return static_cast<std::uint8_t>(1u << static_cast<unsigned>(r));
    }
    std::uint8_t bits_ = 0;
};

// Parses a comma-separated region list. Returns nullopt on any unknown label.
std::optional<std::vector<Region>> parse_region_list(std::string_view text);

}  // namespace costar
