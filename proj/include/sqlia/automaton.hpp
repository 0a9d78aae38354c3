#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlia/text.hpp"

namespace sqlia {

using State = std::uint32_t;

inline constexpr State kRoot = 0;
inline constexpr State kFail = UINT32_MAX;

/// Evidence gathered by one left-to-right pass of a pattern automaton.
struct ScanResult {
    // End offset (exclusive) of the first exact occurrence, in normalized text.
    std::optional<std::size_t> exact_match_end;
    // Longest pattern prefix seen as a substring of the text.
    std::size_t max_depth = 0;
    // End offset (exclusive) where max_depth was first reached; 0 when max_depth is 0.
    std::size_t max_depth_end = 0;
    std::size_t bytes_read = 0;
    std::size_t fail_follows = 0;

    friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

/// Byte-level Aho–Corasick automaton for a single keyword.
///
/// States are numbered by depth: state d is the node whose path-label is the
/// first d bytes of the pattern, so the goto function has exactly one edge per
/// non-terminal state. The root loops on every byte that does not start the
/// pattern, which makes `step` total. Immutable once built; safe to scan from
/// many threads at once.
class PatternAutomaton {
public:
    // Byte-level; any bytes are accepted. Throws EmptyPattern for a zero-length pattern.
    explicit PatternAutomaton(std::string_view pattern);

    std::size_t state_count() const noexcept { return depth_.size(); }
    std::size_t pattern_len() const noexcept { return pattern_.size(); }
    const std::string& pattern() const noexcept { return pattern_; }

    // kFail when there is no edge on `b` out of `s`.
    State go(State s, unsigned char b) const noexcept {
        if (s < pattern_.size() && static_cast<unsigned char>(pattern_[s]) == b) return s + 1;
        return s == kRoot ? kRoot : kFail;
    }
    State fail_link(State s) const noexcept { return fail_[s]; }
    std::size_t depth(State s) const noexcept { return depth_[s]; }
    bool is_terminal(State s) const noexcept { return depth_[s] == pattern_.size(); }

    // Follows failure links until a goto edge exists for `b`, then takes it.
    State step(State s, unsigned char b) const noexcept {
        std::size_t ignored = 0;
        return step(s, b, ignored);
    }
    State step(State s, unsigned char b, std::size_t& fail_follows) const noexcept {
        State next;
        while ((next = go(s, b)) == kFail) {
            s = fail_[s];
            ++fail_follows;
        }
        return next;
    }

    ScanResult scan(std::string_view text) const noexcept;
    ScanResult scan(const NormalizedText& text) const noexcept { return scan(text.view()); }

private:
    std::string pattern_;
    std::vector<State> fail_;
    std::vector<std::size_t> depth_;
};

inline PatternAutomaton build_automaton(const NormalizedText& pattern) {
    return PatternAutomaton(pattern.view());
}

}  // namespace sqlia
