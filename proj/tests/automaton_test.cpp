#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sqlia/automaton.hpp"
#include "sqlia/error.hpp"

using namespace sqlia;

namespace {

PatternAutomaton build(std::string_view p) { return build_automaton(normalize(p)); }

}  // namespace

TEST(BuildAutomaton, ChainWithoutSelfOverlap) {
    const auto a = build("abc");
    ASSERT_EQ(a.state_count(), 4u);
    for (State s = 0; s < 4; ++s) {
        EXPECT_EQ(a.depth(s), s);
        EXPECT_EQ(a.fail_link(s), kRoot);
        EXPECT_EQ(a.is_terminal(s), s == 3);
    }
}

TEST(BuildAutomaton, RepeatedByte) {
    const auto a = build("aa");
    ASSERT_EQ(a.state_count(), 3u);
    EXPECT_EQ(a.fail_link(2), 1u);
}

TEST(BuildAutomaton, QuoteOrQuote) {
    const auto a = build("' or '");
    ASSERT_EQ(a.state_count(), 7u);
    EXPECT_EQ(a.fail_link(6), 1u);
}

TEST(BuildAutomaton, EmptyPatternThrows) { EXPECT_THROW(build(""), EmptyPattern); }

TEST(BuildAutomaton, GotoEdgesFromRoot) {
    const auto a = build("abc");
    EXPECT_EQ(a.go(kRoot, 'a'), 1u);
    for (int b = 0; b < 256; ++b) {
        if (b != 'a') EXPECT_EQ(a.go(kRoot, static_cast<unsigned char>(b)), kRoot);
    }
    EXPECT_EQ(a.go(1, 'x'), kFail);
    EXPECT_EQ(a.go(3, 'a'), kFail);
}

TEST(Step, Examples) {
    const auto abc = build("abc");
    EXPECT_EQ(abc.step(kRoot, 'x'), kRoot);
    EXPECT_EQ(abc.step(kRoot, 'a'), 1u);
    const auto aa = build("aa");
    EXPECT_EQ(aa.step(2, 'a'), 2u);
}

TEST(Scan, EmptyText) {
    const auto r = build("union select").scan(std::string_view{});
    EXPECT_FALSE(r.exact_match_end);
    EXPECT_EQ(r.max_depth, 0u);
    EXPECT_EQ(r.bytes_read, 0u);
}

TEST(Scan, TautologyAttack) {
    const auto q = normalize("Select * from login where user='hacker' or '1'='1' \xE2\x80\x94' and pass='something'");
    const auto r = build("' or '1'='1").scan(q);
    ASSERT_TRUE(r.exact_match_end);
    EXPECT_EQ(*r.exact_match_end, *oracle::first_match_end("' or '1'='1", q.view()));
    EXPECT_EQ(*r.exact_match_end, 49u);
    EXPECT_EQ(r.max_depth, 11u);
}

TEST(Scan, PartialPrefix) {
    const auto r = build("union select").scan(std::string_view{"select union sel from t"});
    EXPECT_FALSE(r.exact_match_end);
    EXPECT_EQ(r.max_depth, 9u);
    EXPECT_EQ(r.max_depth_end, 16u);
    EXPECT_EQ(r.bytes_read, 23u);
}

TEST(ScanProperty, MatchesBruteForceOracles) {
    std::mt19937_64 rng(20240101);
    for (int i = 0; i < 20000; ++i) {
        const auto pattern = oracle::random_string(rng, oracle::kSmallAlphabet, 1, 8);
        const auto text = oracle::random_string(rng, oracle::kSmallAlphabet, 0, 32);
        const PatternAutomaton automaton(pattern);
        const auto r = automaton.scan(std::string_view{text});
        EXPECT_EQ(r.exact_match_end, oracle::first_match_end(pattern, text)) << pattern << " | " << text;
        EXPECT_EQ(r.max_depth, oracle::longest_prefix_in(pattern, text)) << pattern << " | " << text;
        EXPECT_EQ(r.bytes_read, text.size());
        EXPECT_LE(r.fail_follows, text.size());
        EXPECT_EQ(r, automaton.scan(std::string_view{text}));
    }
}

TEST(BuildProperty, FailLinksMatchBruteForce) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 5000; ++i) {
        const auto pattern = oracle::random_string(rng, "ab'", 1, 12);
        const PatternAutomaton a(pattern);
        ASSERT_EQ(a.state_count(), pattern.size() + 1);
        EXPECT_EQ(a.depth(kRoot), 0u);
        std::size_t terminals = 0;
        for (State s = 0; s < a.state_count(); ++s) {
            terminals += a.is_terminal(s);
            if (s == kRoot) continue;
            EXPECT_LT(a.depth(a.fail_link(s)), a.depth(s));
            EXPECT_EQ(a.depth(a.fail_link(s)), oracle::fail_depth(pattern, s)) << pattern << " state " << s;
            if (s < pattern.size()) {
                const State t = a.go(s, static_cast<unsigned char>(pattern[s]));
                EXPECT_EQ(a.depth(t), a.depth(s) + 1);
            }
        }
        EXPECT_EQ(terminals, 1u);
    }
}
