#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "sqlia/pattern.hpp"
#include "sqlia/timestamp.hpp"

namespace sqlia {

inline constexpr std::string_view kPatternFileHeader = "#sqlia-spl v1";

std::string_view to_string(PatternSource source) noexcept;

// Backslash, tab and newline escaping used by the pattern file.
std::string escape_pattern_text(std::string_view text);
// nullopt on an unknown escape or a dangling backslash.
std::optional<std::string> unescape_pattern_text(std::string_view text);

// Pattern file codec. Parsing throws MalformedLine, DuplicateText or NonMonotonicId.
std::string serialize_patterns(const std::vector<AnomalyPattern>& patterns);
std::vector<AnomalyPattern> parse_patterns(std::string_view contents);

// Replaces `path` with `contents` via a temp file and rename. Throws IoFailure.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

/// Write-through, append-only static pattern list backed by a text file.
///
/// Mutations are serialized by an internal mutex; readers take snapshots,
/// which are immutable and never observe a later append.
class PatternStore {
public:
    using Writer = std::function<void(const std::filesystem::path&, std::string_view)>;

    struct AddResult {
        AnomalyPattern pattern;
        bool created = false;  // false: text was already present, store unchanged
    };

    // Absent file yields an empty store. Throws the parse errors above or IoFailure.
    static PatternStore load(std::filesystem::path path, Clock clock = utc_now,
                             Writer writer = write_file_atomically);

    PatternStore(PatternStore&& other) noexcept;
    PatternStore(const PatternStore&) = delete;
    PatternStore& operator=(const PatternStore&) = delete;

    // Throws EmptyPattern, InvalidEncoding, or IoFailure (store unchanged).
    AddResult add_pattern(std::string_view raw_text, PatternSource source);

    PatternSnapshot snapshot() const;
    std::vector<AnomalyPattern> patterns() const;
    std::size_t size() const;
    PatternId next_id() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    PatternStore(std::filesystem::path path, Clock clock, Writer writer);

    std::filesystem::path path_;
    Clock clock_;
    Writer writer_;

    mutable std::mutex write_mu_;     // serializes add_pattern
    mutable std::mutex snapshot_mu_;  // guards the snapshot pointer swap
    PatternSnapshot current_;
    PatternId next_id_ = 1;
};

}  // namespace sqlia
