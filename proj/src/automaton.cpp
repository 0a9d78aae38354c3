#include "sqlia/automaton.hpp"

#include <deque>

#include "sqlia/error.hpp"

namespace sqlia {

PatternAutomaton::PatternAutomaton(std::string_view pattern) : pattern_(pattern) {
    if (pattern_.empty()) throw EmptyPattern();

    const std::size_t n = pattern_.size();
    fail_.assign(n + 1, kRoot);
    depth_.resize(n + 1);
    for (std::size_t d = 0; d <= n; ++d) depth_[d] = d;

    // Breadth-first over the trie. For a single keyword the queue holds at
    // most one state, but the construction is the general one.
    std::deque<State> queue;
    queue.push_back(go(kRoot, static_cast<unsigned char>(pattern_[0])));
    while (!queue.empty()) {
        const State s = queue.front();
        queue.pop_front();
        if (s >= n) continue;
        const auto b = static_cast<unsigned char>(pattern_[s]);
        const State child = s + 1;
        State f = fail_[s];
        while (go(f, b) == kFail) f = fail_[f];
        fail_[child] = go(f, b);
        queue.push_back(child);
    }
}

ScanResult PatternAutomaton::scan(std::string_view text) const noexcept {
    ScanResult r;
    State s = kRoot;
    for (std::size_t i = 0; i < text.size(); ++i) {
        s = step(s, static_cast<unsigned char>(text[i]), r.fail_follows);
        ++r.bytes_read;
        const std::size_t d = depth_[s];
        if (d > r.max_depth) {
            r.max_depth = d;
            r.max_depth_end = i + 1;
        }
        if (!r.exact_match_end && is_terminal(s)) r.exact_match_end = i + 1;
    }
    return r;
}

}  // namespace sqlia
