#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sqlia {

/// Non-negative exact rational percentage. Always stored in lowest terms, so
/// defaulted equality is value equality.
class Percent {
public:
    constexpr Percent() = default;

    // 100 * part / whole. Throws ZeroLengthPattern when whole is 0.
    static Percent of(std::uint64_t part, std::uint64_t whole);
    static Percent from_integer(std::uint64_t value) { return of(value, 100); }
    // Plain decimal ("50", "62.5", "63.636364"); nullopt on anything else.
    static std::optional<Percent> parse(std::string_view text);

    std::uint64_t numerator() const noexcept { return num_; }
    std::uint64_t denominator() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Six fractional digits, rounded half away from zero: 700/11 -> "63.636364".
    std::string to_fixed6() const;

    friend bool operator==(const Percent&, const Percent&) = default;
    friend std::strong_ordering operator<=>(const Percent& a, const Percent& b) noexcept {
        const auto lhs = static_cast<unsigned __int128>(a.num_) * b.den_;
        const auto rhs = static_cast<unsigned __int128>(b.num_) * a.den_;
        return lhs <=> rhs;
    }

private:
    constexpr Percent(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {}
    static Percent reduced(std::uint64_t num, std::uint64_t den);

    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

}  // namespace sqlia
