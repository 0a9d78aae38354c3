#include "sqlia/percent.hpp"

#include <numeric>

#include "sqlia/error.hpp"

namespace sqlia {

Percent Percent::reduced(std::uint64_t num, std::uint64_t den) {
    const auto g = std::gcd(num, den);
    return g > 1 ? Percent(num / g, den / g) : Percent(num, den);
}

Percent Percent::of(std::uint64_t part, std::uint64_t whole) {
    if (whole == 0) throw ZeroLengthPattern();
    const auto g = std::gcd(part, whole);
    part /= g;
    whole /= g;
    const auto g2 = std::gcd(std::uint64_t{100}, whole);
    return reduced(part * (100 / g2), whole / g2);
}

std::optional<Percent> Percent::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    int frac_digits = 0;
    for (const char c : text) {
        if (c == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') return std::nullopt;
        seen_digit = true;
        if (num > (UINT64_MAX - 9) / 10) return std::nullopt;
        num = num * 10 + static_cast<std::uint64_t>(c - '0');
        if (seen_dot) {
            if (++frac_digits > 12) return std::nullopt;
            den *= 10;
        }
    }
    if (!seen_digit) return std::nullopt;
    return reduced(num, den);
}

std::string Percent::to_fixed6() const {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(num_) * 1000000u;
    unsigned __int128 q = scaled / den_;
    const unsigned __int128 rem = scaled % den_;
    if (rem * 2 >= den_) ++q;
    const auto whole = static_cast<std::uint64_t>(q / 1000000u);
    const auto frac = static_cast<std::uint64_t>(q % 1000000u);
    std::string f = std::to_string(frac);
    return std::to_string(whole) + "." + std::string(6 - f.size(), '0') + f;
}

}  // namespace sqlia
