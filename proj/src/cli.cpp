#include "sqlia/cli.hpp"

#include <charconv>
#include <csignal>
#include <fstream>
#include <httplib.h>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "sqlia/error.hpp"

namespace sqlia::cli {

using nlohmann::json;

int exit_code_for(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Accepted: return kExitAccepted;
        case VerdictKind::Alarm: return kExitAlarm;
        case VerdictKind::Rejected: return kExitRejected;
    }
    return kExitError;
}

ScanReport scan_log(std::istream& log, const QueryChecker& check) {
    ScanReport report;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(log, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

        ScanLine rec;
        rec.line_no = line_no;
        try {
            const Verdict v = check(line);
            rec.verdict = v.kind();
            rec.score = v.score();
            if (const auto* r = std::get_if<Rejected>(&v.outcome)) rec.pattern_id = r->pattern_id;
            if (const auto* a = std::get_if<Alarm>(&v.outcome)) rec.pattern_id = a->best_pattern_id;
        } catch (const InvalidEncoding& e) {
            rec.verdict = VerdictKind::Rejected;
            rec.error = e.what();
        }
        ++report.total;
        switch (rec.verdict) {
            case VerdictKind::Accepted: ++report.accepted; break;
            case VerdictKind::Alarm: ++report.alarmed; break;
            case VerdictKind::Rejected: ++report.rejected; break;
        }
        report.lines.push_back(std::move(rec));
    }
    return report;
}

void write_report(const ScanReport& report, std::ostream& out) {
    for (const auto& rec : report.lines) {
        json j = {{"line_no", rec.line_no}, {"verdict", to_string(rec.verdict)}};
        if (rec.error) {
            j["error"] = *rec.error;
        } else {
            j["score"] = rec.score.to_fixed6();
        }
        if (rec.pattern_id) j["pattern_id"] = *rec.pattern_id;
        out << j.dump() << '\n';
    }
    out << json{{"summary",
                 {{"total", report.total},
                  {"accepted", report.accepted},
                  {"alarmed", report.alarmed},
                  {"rejected", report.rejected}}}}
               .dump()
        << '\n';
}

namespace {

// Runs `body`, turning engine errors into a diagnostic and exit code 1.
template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitError;
}

json alarm_line(const AlarmRecord& r) {
    json j = json::parse(to_journal_line(r));
    j["suggested_pattern"] = suggest_pattern(r).str();
    return j;
}

}  // namespace

int cmd_check(std::string_view query, const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(opts.detector);
        auto store = PatternStore::load(opts.patterns);
        const Verdict v = check_query(query, store.snapshot(), opts.detector);
        json j = verdict_json(v);
        if (v.kind() == VerdictKind::Alarm && opts.alarms) {
            auto queue = AlarmQueue::load(*opts.alarms);
            j["alarm_id"] = queue.raise_alarm(query, v).id;
        }
        out << j.dump() << '\n';
        return exit_code_for(v.kind());
    });
}

int cmd_scan_log(const std::filesystem::path& log_file, const Options& opts, std::ostream& out,
                 std::ostream& err) {
    return guarded(err, [&] {
        validate(opts.detector);
        auto store = PatternStore::load(opts.patterns);
        std::ifstream in(log_file, std::ios::binary);
        if (!in) throw IoFailure("cannot read " + log_file.string());
        const auto snapshot = store.snapshot();
        const auto report = scan_log(in, [&](std::string_view q) { return check_query(q, snapshot, opts.detector); });
        if (in.bad()) throw IoFailure("read failed for " + log_file.string());
        write_report(report, out);
        return int{kExitAccepted};
    });
}

int cmd_patterns_list(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto store = PatternStore::load(opts.patterns);
        for (const auto& p : store.patterns()) out << pattern_json(p).dump() << '\n';
        return int{kExitAccepted};
    });
}

int cmd_patterns_add(std::string_view text, const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto store = PatternStore::load(opts.patterns);
        const auto added = store.add_pattern(text, PatternSource::AdminConfirmed);
        json j = pattern_json(added.pattern);
        j["created"] = added.created;
        out << j.dump() << '\n';
        return int{kExitAccepted};
    });
}

int cmd_alarms_list(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto queue = AlarmQueue::load(opts.alarms_or_default());
        for (const auto& r : queue.list()) out << alarm_line(r).dump() << '\n';
        return int{kExitAccepted};
    });
}

int cmd_alarms_decide(std::string_view id, const Decision& decision, const Options& opts, std::ostream& out,
                      std::ostream& err) {
    return guarded(err, [&] {
        AlarmId alarm_id = 0;
        const auto [ptr, ec] = std::from_chars(id.data(), id.data() + id.size(), alarm_id);
        if (id.empty() || ec != std::errc{} || ptr != id.data() + id.size()) {
            throw PreconditionViolation("alarm id must be a non-negative integer");
        }
        auto store = PatternStore::load(opts.patterns);
        auto queue = AlarmQueue::load(opts.alarms_or_default());
        out << alarm_line(queue.decide(alarm_id, decision, store)).dump() << '\n';
        return int{kExitAccepted};
    });
}

int cmd_serve(const Options& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto addr = parse_listen_address(opts.listen);
        if (!addr) throw PreconditionViolation("--listen must be host:port");
        ServiceConfig config;
        config.listen = *addr;
        config.pattern_file = opts.patterns;
        config.alarm_file = opts.alarms_or_default();
        config.detector = opts.detector;
        config.alarm_policy = opts.alarm_policy;

        // Loading happens before bind so bad files fail fast.
        DetectionService service(config);
        httplib::Server server;
        service.mount(server);

        // Signals go to a dedicated waiter thread; worker threads inherit the mask.
        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);

        int port = addr->port;
        if (port == 0) {
            port = server.bind_to_any_port(addr->host);
            if (port < 0) throw IoFailure("cannot bind " + opts.listen);
        } else if (!server.bind_to_port(addr->host, port)) {
            throw IoFailure("cannot bind " + opts.listen);
        }
        std::thread waiter([&] {
            int sig = 0;
            sigwait(&signals, &sig);
            server.stop();
        });
        out << json{{"status", "listening"}, {"address", addr->host + ":" + std::to_string(port)}}.dump()
            << std::endl;
        server.listen_after_bind();
        // listen returned on its own (socket error); wake the waiter.
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
        return int{kExitAccepted};
    });
}

}  // namespace sqlia::cli
