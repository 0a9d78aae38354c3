#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "sqlia/automaton.hpp"
#include "sqlia/text.hpp"
#include "sqlia/timestamp.hpp"

namespace sqlia {

using PatternId = std::uint64_t;

enum class PatternSource { Seed, AdminConfirmed };

/// One entry of the static pattern list.
struct AnomalyPattern {
    PatternId id = 0;
    NormalizedText text;
    PatternSource source = PatternSource::Seed;
    Timestamp created_at{};

    friend bool operator==(const AnomalyPattern&, const AnomalyPattern&) = default;
};

// A pattern together with its prebuilt automaton.
struct CompiledPattern {
    explicit CompiledPattern(AnomalyPattern p) : pattern(std::move(p)), automaton(pattern.text.view()) {}

    AnomalyPattern pattern;
    PatternAutomaton automaton;
};

/// Immutable, id-ordered view of the pattern list at one point in time.
using PatternSnapshot = std::shared_ptr<const std::vector<CompiledPattern>>;

PatternSnapshot compile_patterns(const std::vector<AnomalyPattern>& patterns);

}  // namespace sqlia
