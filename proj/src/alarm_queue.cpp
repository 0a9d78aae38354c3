#include "sqlia/alarm_queue.hpp"

#include <fstream>
#include "json.hpp"

#include "sqlia/error.hpp"

namespace sqlia {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(AlarmStatus status) noexcept {
    switch (status) {
        case AlarmStatus::Pending: return "pending";
        case AlarmStatus::Confirmed: return "confirmed";
        case AlarmStatus::Dismissed: return "dismissed";
    }
    return "unknown";
}

std::optional<AlarmStatus> parse_alarm_status(std::string_view text) noexcept {
    if (text == "pending") return AlarmStatus::Pending;
    if (text == "confirmed") return AlarmStatus::Confirmed;
    if (text == "dismissed") return AlarmStatus::Dismissed;
    return std::nullopt;
}

std::string to_journal_line(const AlarmRecord& r) {
    json j = {
        {"id", r.id},
        {"raw_query", r.raw_query},
        {"normalized_query", r.normalized_query.str()},
        {"score", r.score.to_fixed6()},
        {"best_pattern_id", r.best_pattern_id},
        {"status", to_string(r.status)},
        {"raised_at", format_utc(r.raised_at)},
    };
    if (r.new_pattern_id) j["new_pattern_id"] = *r.new_pattern_id;
    if (r.decided_at) j["decided_at"] = format_utc(*r.decided_at);
    return j.dump();
}

AlarmRecord parse_journal_line(std::string_view line, std::size_t line_no) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw MalformedLine(line_no, "not a JSON object");

    auto require = [&](const char* key, auto check) -> const json& {
        auto it = j.find(key);
        if (it == j.end() || !check(*it)) throw MalformedLine(line_no, std::string("bad field ") + key);
        return *it;
    };
    auto is_id = [](const json& v) { return v.is_number_unsigned(); };
    auto is_str = [](const json& v) { return v.is_string(); };
    auto timestamp = [&](const char* key) {
        auto t = parse_utc(require(key, is_str).get_ref<const std::string&>());
        if (!t) throw MalformedLine(line_no, std::string("bad timestamp ") + key);
        return *t;
    };

    AlarmRecord r;
    r.id = require("id", is_id).get<AlarmId>();
    r.raw_query = require("raw_query", is_str).get<std::string>();
    auto normalized = require("normalized_query", is_str).get<std::string>();
    if (!is_normalized(normalized)) throw MalformedLine(line_no, "normalized_query not normalized");
    r.normalized_query = NormalizedText::from_normalized(std::move(normalized));
    const auto score = Percent::parse(require("score", is_str).get_ref<const std::string&>());
    if (!score || *score > Percent::from_integer(100)) throw MalformedLine(line_no, "bad score");
    r.score = *score;
    r.best_pattern_id = require("best_pattern_id", is_id).get<PatternId>();
    const auto status = parse_alarm_status(require("status", is_str).get_ref<const std::string&>());
    if (!status) throw MalformedLine(line_no, "bad status");
    r.status = *status;
    r.raised_at = timestamp("raised_at");

    const bool decided = r.status != AlarmStatus::Pending;
    if (decided) r.decided_at = timestamp("decided_at");
    else if (j.contains("decided_at")) throw MalformedLine(line_no, "decided_at on pending alarm");
    if (r.status == AlarmStatus::Confirmed) r.new_pattern_id = require("new_pattern_id", is_id).get<PatternId>();
    else if (j.contains("new_pattern_id")) throw MalformedLine(line_no, "new_pattern_id without confirmation");
    return r;
}

void append_line(const fs::path& path, std::string_view line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw IoFailure("cannot open " + path.string() + " for append");
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
    out.put('\n');
    out.flush();
    if (!out) throw IoFailure("append failed for " + path.string());
}

AlarmQueue::AlarmQueue(fs::path path, Clock clock, Appender appender)
    : path_(std::move(path)), clock_(std::move(clock)), appender_(std::move(appender)) {}

AlarmQueue::AlarmQueue(AlarmQueue&& other) noexcept
    : path_(std::move(other.path_)),
      clock_(std::move(other.clock_)),
      appender_(std::move(other.appender_)),
      records_(std::move(other.records_)),
      journal_(std::move(other.journal_)),
      next_id_(other.next_id_) {}

AlarmQueue AlarmQueue::load(fs::path path, Clock clock, Appender appender) {
    AlarmQueue q(std::move(path), std::move(clock), std::move(appender));
    std::error_code ec;
    if (!fs::exists(q.path_, ec)) return q;

    std::ifstream in(q.path_, std::ios::binary);
    if (!in) throw IoFailure("cannot read " + q.path_.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (in.eof()) throw MalformedLine(line_no, "missing trailing newline");
        AlarmRecord r = parse_journal_line(line, line_no);
        auto it = q.records_.find(r.id);
        if (it == q.records_.end()) {
            if (r.status != AlarmStatus::Pending || r.id < q.next_id_) {
                throw MalformedLine(line_no, "new alarm must be pending with a fresh id");
            }
            q.next_id_ = r.id + 1;
            q.records_.emplace(r.id, r);
        } else {
            if (it->second.status != AlarmStatus::Pending || r.status == AlarmStatus::Pending) {
                throw MalformedLine(line_no, "invalid status transition");
            }
            it->second = r;
        }
        q.journal_.push_back(std::move(r));
    }
    return q;
}

AlarmRecord AlarmQueue::raise_alarm(std::string_view raw_query, const Verdict& verdict) {
    const auto* alarm = std::get_if<Alarm>(&verdict.outcome);
    if (!alarm) throw PreconditionViolation("raise_alarm requires an Alarm verdict");

    std::lock_guard lock(mu_);
    AlarmRecord r;
    r.id = next_id_;
    r.raw_query = std::string(raw_query);
    r.normalized_query = verdict.normalized_query;
    r.score = alarm->score;
    r.best_pattern_id = alarm->best_pattern_id;
    r.raised_at = clock_();

    appender_(path_, to_journal_line(r));
    ++next_id_;
    records_.emplace(r.id, r);
    journal_.push_back(r);
    return r;
}

AlarmRecord AlarmQueue::decide(AlarmId id, const Decision& decision, PatternStore& store) {
    std::lock_guard lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) throw UnknownAlarm(id);
    if (it->second.status != AlarmStatus::Pending) throw AlreadyDecided(id);

    AlarmRecord updated = it->second;
    if (const auto* confirm = std::get_if<ConfirmDecision>(&decision)) {
        // Pattern first: a failure after this point leaves an extra pattern,
        // never a confirmed alarm without one.
        const auto added = store.add_pattern(confirm->pattern_text, PatternSource::AdminConfirmed);
        updated.status = AlarmStatus::Confirmed;
        updated.new_pattern_id = added.pattern.id;
    } else {
        updated.status = AlarmStatus::Dismissed;
    }
    updated.decided_at = clock_();

    appender_(path_, to_journal_line(updated));
    it->second = updated;
    journal_.push_back(updated);
    return updated;
}

std::optional<AlarmRecord> AlarmQueue::get(AlarmId id) const {
    std::lock_guard lock(mu_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::vector<AlarmRecord> AlarmQueue::list(std::optional<AlarmStatus> status) const {
    std::lock_guard lock(mu_);
    std::vector<AlarmRecord> out;
    for (const auto& [id, r] : records_) {
        if (!status || r.status == *status) out.push_back(r);
    }
    return out;
}

std::size_t AlarmQueue::pending_count() const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& [id, r] : records_) n += r.status == AlarmStatus::Pending;
    return n;
}

std::string AlarmQueue::serialize() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& r : journal_) {
        out += to_journal_line(r);
        out.push_back('\n');
    }
    return out;
}

}  // namespace sqlia
