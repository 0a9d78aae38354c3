#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "sqlia/automaton.hpp"
#include "sqlia/pattern.hpp"
#include "sqlia/percent.hpp"

namespace sqlia {

struct DetectorConfig {
    Percent threshold = Percent::from_integer(50);
};

// Throws PreconditionViolation unless 0 < threshold <= 100.
void validate(const DetectorConfig& config);

/// 100 * max_depth / pattern_len, exact.
Percent anomaly_score(const ScanResult& scan, std::size_t pattern_len);

struct Rejected {
    PatternId pattern_id = 0;
    std::size_t match_end = 0;

    friend bool operator==(const Rejected&, const Rejected&) = default;
};

struct Alarm {
    Percent score;
    PatternId best_pattern_id = 0;
    // Where the best pattern's longest prefix was first seen in the normalized query.
    std::size_t max_depth = 0;
    std::size_t max_depth_end = 0;

    friend bool operator==(const Alarm&, const Alarm&) = default;
};

struct Accepted {
    Percent max_score;
    std::optional<PatternId> best_pattern_id;

    friend bool operator==(const Accepted&, const Accepted&) = default;
};

enum class VerdictKind { Accepted, Alarm, Rejected };

std::string_view to_string(VerdictKind kind) noexcept;

struct Verdict {
    std::variant<Accepted, Alarm, Rejected> outcome;
    NormalizedText normalized_query;

    VerdictKind kind() const noexcept { return static_cast<VerdictKind>(outcome.index()); }
    // 100 for Rejected.
    Percent score() const;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Screens one query against every pattern, in id order.
///
/// Exact match on any pattern rejects (lowest id wins). Otherwise the highest
/// anomaly score over all patterns decides: at or above the threshold raises an
/// alarm, below it accepts. Ties go to the lowest pattern id. Pure; throws
/// InvalidEncoding for non-UTF-8 input.
Verdict check_query(std::string_view raw_query, std::span<const CompiledPattern> patterns,
                    const DetectorConfig& config);

inline Verdict check_query(std::string_view raw_query, const PatternSnapshot& snapshot,
                           const DetectorConfig& config) {
    return check_query(raw_query, std::span<const CompiledPattern>(*snapshot), config);
}

// Compiles automata on the fly; convenient for one-off checks.
Verdict check_query(std::string_view raw_query, std::span<const AnomalyPattern> patterns,
                    const DetectorConfig& config);

}  // namespace sqlia
