#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlia/detector.hpp"
#include "sqlia/pattern_store.hpp"
#include "sqlia/percent.hpp"
#include "sqlia/timestamp.hpp"

namespace sqlia {

using AlarmId = std::uint64_t;

enum class AlarmStatus { Pending, Confirmed, Dismissed };

std::string_view to_string(AlarmStatus status) noexcept;
std::optional<AlarmStatus> parse_alarm_status(std::string_view text) noexcept;

struct AlarmRecord {
    AlarmId id = 0;
    std::string raw_query;
    NormalizedText normalized_query;
    Percent score;
    PatternId best_pattern_id = 0;
    AlarmStatus status = AlarmStatus::Pending;
    std::optional<PatternId> new_pattern_id;  // set iff Confirmed
    Timestamp raised_at{};
    std::optional<Timestamp> decided_at;  // absent while Pending

    friend bool operator==(const AlarmRecord&, const AlarmRecord&) = default;
};

// Journal line codec: one JSON object, no trailing newline.
std::string to_journal_line(const AlarmRecord& record);
// Throws MalformedLine(line_no) on bad JSON or missing/ill-typed fields.
AlarmRecord parse_journal_line(std::string_view line, std::size_t line_no);

// The default pattern suggestion for an alarm: the whole normalized query.
inline const NormalizedText& suggest_pattern(const AlarmRecord& record) noexcept {
    return record.normalized_query;
}

struct ConfirmDecision {
    std::string pattern_text;
};
struct DismissDecision {};
using Decision = std::variant<ConfirmDecision, DismissDecision>;

// Appends `line` plus LF to `path`. Throws IoFailure.
void append_line(const std::filesystem::path& path, std::string_view line);

/// Pending and decided administrator alarms, persisted as an append-only
/// JSON-lines journal. A status change appends a superseding record with the
/// same id; replay keeps the latest record per id.
class AlarmQueue {
public:
    using Appender = std::function<void(const std::filesystem::path&, std::string_view)>;

    // Absent file yields an empty queue. Throws MalformedLine or IoFailure.
    static AlarmQueue load(std::filesystem::path path, Clock clock = utc_now,
                           Appender appender = append_line);

    AlarmQueue(AlarmQueue&& other) noexcept;
    AlarmQueue(const AlarmQueue&) = delete;
    AlarmQueue& operator=(const AlarmQueue&) = delete;

    // Throws PreconditionViolation unless the verdict is an Alarm; IoFailure leaves the queue unchanged.
    AlarmRecord raise_alarm(std::string_view raw_query, const Verdict& verdict);

    // Confirm adds the pattern first, then journals the status change.
    // Throws UnknownAlarm, AlreadyDecided, EmptyPattern, IoFailure.
    AlarmRecord decide(AlarmId id, const Decision& decision, PatternStore& store);

    std::optional<AlarmRecord> get(AlarmId id) const;
    std::vector<AlarmRecord> list(std::optional<AlarmStatus> status = std::nullopt) const;
    std::size_t pending_count() const;

    // The journal as it would be written from scratch; equals the file for a
    // journal this class produced.
    std::string serialize() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    AlarmQueue(std::filesystem::path path, Clock clock, Appender appender);

    std::filesystem::path path_;
    Clock clock_;
    Appender appender_;

    mutable std::mutex mu_;
    std::map<AlarmId, AlarmRecord> records_;
    std::vector<AlarmRecord> journal_;
    AlarmId next_id_ = 1;
};

}  // namespace sqlia
