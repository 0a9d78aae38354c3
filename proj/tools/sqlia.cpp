// sqlia: screen SQL queries against the anomaly pattern list, manage the
// list and the administrator alarm queue, or run the HTTP detection service.

#include <CLI11.hpp>
#include <iostream>

#include "sqlia/cli.hpp"
#include "sqlia/error.hpp"

namespace {

std::optional<sqlia::Percent> threshold_from(const std::string& text) {
    auto p = sqlia::Percent::parse(text);
    if (!p || *p == sqlia::Percent{} || *p > sqlia::Percent::from_integer(100)) return std::nullopt;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace sqlia::cli;

    CLI::App app{"SQL injection detection with an Aho-Corasick pattern list"};
    app.require_subcommand(1);

    Options opts;
    std::string patterns = opts.patterns.string();
    std::string alarms;
    std::string threshold = "50";
    std::string policy = "allow";
    app.add_option("--patterns", patterns, "Pattern list file")->capture_default_str();
    app.add_option("--alarms", alarms, "Alarm journal file (default alarms.jsonl)");
    app.add_option("--threshold", threshold, "Alarm threshold percent, in (0, 100]")->capture_default_str();
    app.add_option("--listen", opts.listen, "Service address host:port")->capture_default_str();
    app.add_option("--alarm-policy", policy, "allow|block")->check(CLI::IsMember({"allow", "block"}));

    std::string query;
    auto* check = app.add_subcommand("check", "Check one query; exit 0 accepted, 2 alarm, 3 rejected");
    check->add_option("query", query)->required();

    std::string log_file;
    auto* scan = app.add_subcommand("scan-log", "Check every non-blank line of a query log");
    scan->add_option("file", log_file)->required();

    std::string text;
    auto* patterns_cmd = app.add_subcommand("patterns", "List or add patterns");
    patterns_cmd->require_subcommand(1);
    auto* patterns_list = patterns_cmd->add_subcommand("list", "Print all patterns");
    auto* patterns_add = patterns_cmd->add_subcommand("add", "Add a pattern");
    patterns_add->add_option("text", text)->required();

    std::string alarm_id;
    auto* alarms_cmd = app.add_subcommand("alarms", "List or decide administrator alarms");
    alarms_cmd->require_subcommand(1);
    auto* alarms_list = alarms_cmd->add_subcommand("list", "Print all alarms");
    auto* alarms_confirm = alarms_cmd->add_subcommand("confirm", "Confirm an alarm and add a pattern");
    alarms_confirm->add_option("id", alarm_id)->required();
    alarms_confirm->add_option("text", text)->required();
    auto* alarms_dismiss = alarms_cmd->add_subcommand("dismiss", "Dismiss an alarm");
    alarms_dismiss->add_option("id", alarm_id)->required();

    auto* serve = app.add_subcommand("serve", "Run the HTTP detection service");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitError;
    }

    const auto t = threshold_from(threshold);
    if (!t) {
        std::cerr << "error: --threshold must be a decimal in (0, 100]\n";
        return kExitError;
    }
    opts.detector.threshold = *t;
    opts.patterns = patterns;
    if (!alarms.empty()) opts.alarms = alarms;
    opts.alarm_policy = *sqlia::parse_alarm_policy(policy);

    auto& out = std::cout;
    auto& err = std::cerr;
    if (*check) return cmd_check(query, opts, out, err);
    if (*scan) return cmd_scan_log(log_file, opts, out, err);
    if (*patterns_list) return cmd_patterns_list(opts, out, err);
    if (*patterns_add) return cmd_patterns_add(text, opts, out, err);
    if (*alarms_list) return cmd_alarms_list(opts, out, err);
    if (*alarms_confirm) return cmd_alarms_decide(alarm_id, sqlia::ConfirmDecision{text}, opts, out, err);
    if (*alarms_dismiss) return cmd_alarms_decide(alarm_id, sqlia::DismissDecision{}, opts, out, err);
    if (*serve) return cmd_serve(opts, out, err);
    return kExitError;
}
