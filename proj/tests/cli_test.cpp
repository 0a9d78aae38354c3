#include <gtest/gtest.h>

#include <array>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

#include <httplib.h>

#include "json.hpp"
#include "process.hpp"
#include "sqlia/cli.hpp"
#include "test_support.hpp"

using namespace sqlia;
using namespace sqlia::cli;
using nlohmann::json;
using sqlia::testing::TempDir;
using sqlia::testing::read_file;
using sqlia::testing::write_file;

namespace {

constexpr std::string_view kAttack =
    "Select * from login where user='hacker' or '1'='1' \xE2\x80\x94' and pass='something'";
constexpr std::string_view kLegal = "SELECT * FROM user_account WHERE login='John' AND pass='xyz'";
constexpr std::string_view kPartial = "select * from login where user='' or '1 and pass=''";

struct Env {
    TempDir dir;
    Options opts;
    std::ostringstream out, err;

    Env() {
        opts.patterns = dir / "patterns.spl";
        std::filesystem::copy_file(SQLIA_SEED_PATTERNS, opts.patterns);
    }
    void reset() {
        out.str("");
        err.str("");
    }
};

struct ProcResult {
    int exit_code = -1;
    std::string out;
};

std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

ProcResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(SQLIA_CLI_PATH);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>/dev/null";
    ProcResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST(Cli, ExitCodesAreTotalOverVerdicts) {
    EXPECT_EQ(exit_code_for(VerdictKind::Accepted), 0);
    EXPECT_EQ(exit_code_for(VerdictKind::Alarm), 2);
    EXPECT_EQ(exit_code_for(VerdictKind::Rejected), 3);
}

TEST(Cli, CheckVerdicts) {
    Env env;
    EXPECT_EQ(cmd_check(kLegal, env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["verdict"], "accepted");
    env.reset();
    EXPECT_EQ(cmd_check(kAttack, env.opts, env.out, env.err), 3);
    EXPECT_EQ(json::parse(env.out.str())["pattern_id"], 1);
    env.reset();
    EXPECT_EQ(cmd_check(kPartial, env.opts, env.out, env.err), 2);
    EXPECT_FALSE(json::parse(env.out.str()).contains("alarm_id"));
}

TEST(Cli, CheckWithEmptyList) {
    Env env;
    env.opts.patterns = env.dir / "missing.spl";
    EXPECT_EQ(cmd_check("select 1", env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["score"], "0.000000");
}

TEST(Cli, CheckMalformedPatternFile) {
    Env env;
    write_file(env.opts.patterns, "#sqlia-spl v1\nbad\n");
    EXPECT_EQ(cmd_check("select 1", env.opts, env.out, env.err), 1);
    EXPECT_NE(env.err.str().find("line 2"), std::string::npos);
    EXPECT_TRUE(env.out.str().empty());
}

TEST(Cli, CheckRaisesAlarmWhenJournalGiven) {
    Env env;
    env.opts.alarms = env.dir / "alarms.jsonl";
    EXPECT_EQ(cmd_check(kPartial, env.opts, env.out, env.err), 2);
    EXPECT_EQ(json::parse(env.out.str())["alarm_id"], 1);
    EXPECT_EQ(AlarmQueue::load(*env.opts.alarms).pending_count(), 1u);
}

TEST(Cli, ScanLogCountsAndDeterminism) {
    Env env;
    const auto log = env.dir / "queries.log";
    write_file(log, std::string(kLegal) + "\n\n" + std::string(kAttack) + "\n   \n" + std::string(kPartial) + "\n");
    EXPECT_EQ(cmd_scan_log(log, env.opts, env.out, env.err), 0);
    const auto first = env.out.str();
    std::istringstream lines(first);
    std::string line;
    std::vector<json> records;
    while (std::getline(lines, line)) records.push_back(json::parse(line));
    ASSERT_EQ(records.size(), 4u);
    EXPECT_EQ(records[0]["line_no"], 1);
    EXPECT_EQ(records[0]["verdict"], "accepted");
    EXPECT_EQ(records[1]["line_no"], 3);
    EXPECT_EQ(records[1]["verdict"], "rejected");
    EXPECT_EQ(records[2]["line_no"], 5);
    EXPECT_EQ(records[2]["verdict"], "alarm");
    EXPECT_EQ(records[3]["summary"], (json{{"total", 3}, {"accepted", 1}, {"alarmed", 1}, {"rejected", 1}}));

    env.reset();
    EXPECT_EQ(cmd_scan_log(log, env.opts, env.out, env.err), 0);
    EXPECT_EQ(env.out.str(), first);
}

TEST(Cli, ScanLogEmptyAndUnreadable) {
    Env env;
    write_file(env.dir / "empty.log", "");
    EXPECT_EQ(cmd_scan_log(env.dir / "empty.log", env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["summary"]["total"], 0);
    env.reset();
    EXPECT_EQ(cmd_scan_log(env.dir / "nope.log", env.opts, env.out, env.err), 1);
}

TEST(Cli, ScanLogEncodingErrorsContinue) {
    std::istringstream log("select 1\nselect \xFF\nselect 2\n");
    int calls = 0;
    const auto report = scan_log(log, [&](std::string_view q) {
        ++calls;
        return check_query(q, std::span<const AnomalyPattern>{}, DetectorConfig{});
    });
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(report.total, 3u);
    EXPECT_EQ(report.rejected, 1u);
    ASSERT_TRUE(report.lines[1].error);
    EXPECT_EQ(report.lines[1].line_no, 2u);
}

TEST(Cli, ScanLogCallsCheckOncePerNonBlankLine) {
    std::string text;
    for (int i = 0; i < 100; ++i) text += (i % 3 == 0 ? std::string(" \t") : "q" + std::to_string(i)) + "\n";
    std::istringstream log(text);
    std::size_t calls = 0;
    const auto report = scan_log(log, [&](std::string_view q) {
        ++calls;
        return check_query(q, std::span<const AnomalyPattern>{}, DetectorConfig{});
    });
    EXPECT_EQ(calls, report.total);
    EXPECT_EQ(report.total, 66u);
    EXPECT_EQ(report.accepted + report.alarmed + report.rejected, report.total);
    for (std::size_t i = 1; i < report.lines.size(); ++i) EXPECT_GT(report.lines[i].line_no, report.lines[i - 1].line_no);
}

TEST(Cli, PatternsAndAlarmsCommands) {
    Env env;
    env.opts.alarms = env.dir / "alarms.jsonl";
    EXPECT_EQ(cmd_patterns_add("UNION  Select", env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["created"], false);
    env.reset();
    EXPECT_EQ(cmd_patterns_list(env.opts, env.out, env.err), 0);
    EXPECT_NE(env.out.str().find("\"' or '1'='1\""), std::string::npos);
    env.reset();
    EXPECT_EQ(cmd_patterns_add("   ", env.opts, env.out, env.err), 1);

    env.reset();
    cmd_check("select * from t where name='' or '1'=1 --", env.opts, env.out, env.err);
    env.reset();
    EXPECT_EQ(cmd_alarms_list(env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["status"], "pending");
    env.reset();
    EXPECT_EQ(cmd_alarms_decide("1", ConfirmDecision{"' or '1'=1 --"}, env.opts, env.out, env.err), 0);
    EXPECT_EQ(json::parse(env.out.str())["status"], "confirmed");
    env.reset();
    EXPECT_EQ(cmd_alarms_decide("1", DismissDecision{}, env.opts, env.out, env.err), 1);
    EXPECT_NE(env.err.str().find("already decided"), std::string::npos);
    env.reset();
    EXPECT_EQ(cmd_alarms_decide("abc", DismissDecision{}, env.opts, env.out, env.err), 1);
    env.reset();
    EXPECT_EQ(cmd_check("select * from t where name='' or '1'=1 --", env.opts, env.out, env.err), 3);
}

TEST(CliBinary, ExitCodesFromProcess) {
    TempDir dir;
    const auto patterns = (dir / "p.spl").string();
    std::filesystem::copy_file(SQLIA_SEED_PATTERNS, patterns);
    EXPECT_EQ(run_cli({"--patterns", patterns, "check", std::string(kLegal)}).exit_code, 0);
    EXPECT_EQ(run_cli({"--patterns", patterns, "check", std::string(kAttack)}).exit_code, 3);
    EXPECT_EQ(run_cli({"--patterns", patterns, "check", std::string(kPartial)}).exit_code, 2);
    EXPECT_EQ(run_cli({"--patterns", patterns, "--threshold", "0", "check", "x"}).exit_code, 1);
    EXPECT_EQ(run_cli({"--patterns", patterns, "--threshold", "90", "check", std::string(kPartial)}).exit_code, 0);
    EXPECT_EQ(run_cli({"bogus"}).exit_code, 1);
    const auto r = run_cli({"--patterns", (dir / "none.spl").string(), "check", "x"});
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(json::parse(r.out)["score"], "0.000000");
}

TEST(CliBinary, ServeRejectsBadPatternFile) {
    TempDir dir;
    write_file(dir / "bad.spl", "nope\n");
    const auto r = run_cli({"--patterns", (dir / "bad.spl").string(), "--alarms", (dir / "a.jsonl").string(),
                            "--listen", "127.0.0.1:0", "serve"});
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliBinary, ServeAnswersHealthAndShutsDownCleanly) {
    TempDir dir;
    std::filesystem::copy_file(SQLIA_SEED_PATTERNS, dir / "p.spl");
    sqlia::testing::ChildProcess proc({SQLIA_CLI_PATH, "--patterns", (dir / "p.spl").string(), "--alarms",
                                       (dir / "a.jsonl").string(), "--listen", "127.0.0.1:0", "serve"});
    const auto banner = json::parse(proc.read_line());
    ASSERT_EQ(banner["status"], "listening");
    const auto address = banner["address"].get<std::string>();
    const int port = std::stoi(address.substr(address.rfind(':') + 1));

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/v1/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(json::parse(health->body)["status"], "ok");
    EXPECT_EQ(proc.stop(SIGINT), 0);
}
