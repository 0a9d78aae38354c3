#include "sqlia/text.hpp"

#include "sqlia/error.hpp"

namespace sqlia {

bool is_sql_space(unsigned char b) noexcept {
    return b == 0x20 || b == 0x09 || b == 0x0A || b == 0x0D;
}

std::size_t find_invalid_utf8(std::string_view raw) noexcept {
    const auto* p = reinterpret_cast<const unsigned char*>(raw.data());
    const std::size_t n = raw.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char c = p[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        unsigned char lo = 0x80, hi = 0xBF;
        if (c >= 0xC2 && c <= 0xDF) {
            len = 2;
        } else if (c >= 0xE0 && c <= 0xEF) {
            len = 3;
            if (c == 0xE0) lo = 0xA0;       // overlong
            else if (c == 0xED) hi = 0x9F;  // surrogates
        } else if (c >= 0xF0 && c <= 0xF4) {
            len = 4;
            if (c == 0xF0) lo = 0x90;
            else if (c == 0xF4) hi = 0x8F;  // > U+10FFFF
        } else {
            return i;
        }
        if (i + len > n) return i;
        if (p[i + 1] < lo || p[i + 1] > hi) return i;
        for (std::size_t k = 2; k < len; ++k) {
            if (p[i + k] < 0x80 || p[i + k] > 0xBF) return i;
        }
        i += len;
    }
    return std::string_view::npos;
}

NormalizedText normalize(std::string_view raw) {
    if (auto bad = find_invalid_utf8(raw); bad != std::string_view::npos) {
        throw InvalidEncoding(bad);
    }
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (const char ch : raw) {
        const auto b = static_cast<unsigned char>(ch);
        if (is_sql_space(b)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(b >= 'A' && b <= 'Z' ? static_cast<char>(b + ('a' - 'A')) : ch);
    }
    return NormalizedText(std::move(out));
}

bool is_normalized(std::string_view raw) noexcept {
    if (find_invalid_utf8(raw) != std::string_view::npos) return false;
    if (!raw.empty() && (raw.front() == ' ' || raw.back() == ' ')) return false;
    unsigned char prev = 0;
    for (const char ch : raw) {
        const auto b = static_cast<unsigned char>(ch);
        if (b >= 'A' && b <= 'Z') return false;
        if (is_sql_space(b) && b != ' ') return false;
        if (b == ' ' && prev == ' ') return false;
        prev = b;
    }
    return true;
}

NormalizedText NormalizedText::from_normalized(std::string raw) {
    if (auto bad = find_invalid_utf8(raw); bad != std::string_view::npos) {
        throw InvalidEncoding(bad);
    }
    if (!is_normalized(raw)) {
        throw PreconditionViolation("text is not in normalized form");
    }
    return NormalizedText(std::move(raw));
}

}  // namespace sqlia
