#include "sqlia/detector.hpp"

#include <vector>

#include "sqlia/error.hpp"

namespace sqlia {

PatternSnapshot compile_patterns(const std::vector<AnomalyPattern>& patterns) {
    auto compiled = std::make_shared<std::vector<CompiledPattern>>();
    compiled->reserve(patterns.size());
    for (const auto& p : patterns) compiled->emplace_back(p);
    return compiled;
}

void validate(const DetectorConfig& config) {
    if (config.threshold == Percent{} || config.threshold > Percent::from_integer(100)) {
        throw PreconditionViolation("threshold must be in (0, 100]");
    }
}

Percent anomaly_score(const ScanResult& scan, std::size_t pattern_len) {
    if (pattern_len == 0) throw ZeroLengthPattern();
    if (scan.max_depth > pattern_len) throw PreconditionViolation("max_depth exceeds pattern length");
    return Percent::of(scan.max_depth, pattern_len);
}

std::string_view to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Accepted: return "accepted";
        case VerdictKind::Alarm: return "alarm";
        case VerdictKind::Rejected: return "rejected";
    }
    return "unknown";
}

Percent Verdict::score() const {
    if (const auto* a = std::get_if<Accepted>(&outcome)) return a->max_score;
    if (const auto* a = std::get_if<Alarm>(&outcome)) return a->score;
    return Percent::from_integer(100);
}

Verdict check_query(std::string_view raw_query, std::span<const CompiledPattern> patterns,
                    const DetectorConfig& config) {
    NormalizedText query = normalize(raw_query);

    // SPMA walks the list in order; the accept decision waits for the last
    // pattern, and an exact match anywhere overrides any score.
    std::optional<Alarm> best;
    for (const auto& cp : patterns) {
        const ScanResult scan = cp.automaton.scan(query);
        if (scan.exact_match_end) {
            return Verdict{Rejected{cp.pattern.id, *scan.exact_match_end}, std::move(query)};
        }
        const Percent score = anomaly_score(scan, cp.automaton.pattern_len());
        if (!best || score > best->score) {
            best = Alarm{score, cp.pattern.id, scan.max_depth, scan.max_depth_end};
        }
    }

    if (best && best->score >= config.threshold) {
        return Verdict{*best, std::move(query)};
    }
    Accepted accepted;
    if (best) {
        accepted.max_score = best->score;
        accepted.best_pattern_id = best->best_pattern_id;
    }
    return Verdict{accepted, std::move(query)};
}

Verdict check_query(std::string_view raw_query, std::span<const AnomalyPattern> patterns,
                    const DetectorConfig& config) {
    std::vector<CompiledPattern> compiled;
    compiled.reserve(patterns.size());
    for (const auto& p : patterns) compiled.emplace_back(p);
    return check_query(raw_query, std::span<const CompiledPattern>(compiled), config);
}

}  // namespace sqlia
