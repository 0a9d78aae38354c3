#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlia/detector.hpp"
#include "sqlia/service.hpp"

namespace sqlia::cli {

// Process exit codes. A verdict maps to exactly one of the first three.
enum ExitCode : int {
    kExitAccepted = 0,
    kExitError = 1,
    kExitAlarm = 2,
    kExitRejected = 3,
};

int exit_code_for(VerdictKind kind) noexcept;

struct Options {
    std::filesystem::path patterns = "patterns.spl";
    // check raises alarms only when a journal was named explicitly.
    std::optional<std::filesystem::path> alarms;
    DetectorConfig detector;
    std::string listen = "127.0.0.1:8080";
    AlarmPolicy alarm_policy = AlarmPolicy::AllowAndLog;

    std::filesystem::path alarms_or_default() const { return alarms.value_or("alarms.jsonl"); }
};

struct ScanLine {
    std::size_t line_no = 0;
    VerdictKind verdict = VerdictKind::Accepted;
    Percent score;
    std::optional<PatternId> pattern_id;
    std::optional<std::string> error;
};

struct ScanReport {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t alarmed = 0;
    std::size_t rejected = 0;
    std::vector<ScanLine> lines;
};

using QueryChecker = std::function<Verdict(std::string_view)>;

// One check per non-blank line. Lines that fail to decode are counted as
// rejected with an error and the scan continues.
ScanReport scan_log(std::istream& log, const QueryChecker& check);
void write_report(const ScanReport& report, std::ostream& out);

int cmd_check(std::string_view query, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_scan_log(const std::filesystem::path& log_file, const Options& opts, std::ostream& out,
                 std::ostream& err);
int cmd_patterns_list(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_patterns_add(std::string_view text, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_alarms_list(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_alarms_decide(std::string_view id, const Decision& decision, const Options& opts, std::ostream& out,
                      std::ostream& err);
// Blocks until SIGINT/SIGTERM.
int cmd_serve(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace sqlia::cli
