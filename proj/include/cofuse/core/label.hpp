#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>

namespace cofuse {

using NodeId = std::uint32_t;
using Time = std::int64_t;

/// Origin node reserved for labels that carry no node identity, i.e. the plain
/// (birth time, birth index) pairs used by the baseline configuration.
inline constexpr NodeId kNoOrigin = 0;

/// Track identity: (birth time, origin node, birth index).
///
/// Ordering is by age: a label is older when it was born earlier, with ties broken by
/// (origin_node, birth_index). The defaulted comparison relies on the field order below.
struct Label {
    Time birth_time = 0;
    NodeId origin_node = kNoOrigin;
    std::uint32_t birth_index = 1;

    friend constexpr auto operator<=>(const Label&, const Label&) = default;

    [[nodiscard]] constexpr bool older_than(const Label& other) const noexcept { return *this < other; }
};

/// How birth labels are minted.
enum class LabelMode {
    NodeExtended, ///< (k, i, m): the birth node is part of the identity.
    Degenerate,   ///< (k, m): origin is always kNoOrigin, so independent nodes can collide.
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) {
    return os << '(' << l.birth_time << ',' << l.origin_node << ',' << l.birth_index << ')';
}

} // namespace cofuse

template <>
struct std::hash<cofuse::Label> {
    std::size_t operator()(const cofuse::Label& l) const noexcept {
        std::size_t h = std::hash<cofuse::Time>{}(l.birth_time);
        h ^= std::hash<std::uint64_t>{}((std::uint64_t{l.origin_node} << 32) | l.birth_index) + 0x9e3779b9 + (h << 6) + (h >> 2);
        return h;
    }
};
