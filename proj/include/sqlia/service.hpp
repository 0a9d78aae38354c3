#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "sqlia/alarm_queue.hpp"
#include "sqlia/detector.hpp"
#include "sqlia/pattern_store.hpp"

namespace httplib {
class Server;
}

namespace sqlia {

enum class AlarmPolicy { AllowAndLog, Block };

std::optional<AlarmPolicy> parse_alarm_policy(std::string_view text) noexcept;

struct ListenAddress {
    std::string host = "127.0.0.1";
    int port = 8080;
};

// "host:port"; nullopt when the port is missing or out of range.
std::optional<ListenAddress> parse_listen_address(std::string_view text);

struct ServiceConfig {
    ListenAddress listen;
    std::filesystem::path pattern_file = "patterns.spl";
    std::filesystem::path alarm_file = "alarms.jsonl";
    DetectorConfig detector;
    AlarmPolicy alarm_policy = AlarmPolicy::AllowAndLog;
    std::string cors_origin = "*";
};

struct ApiResponse {
    int status = 200;
    nlohmann::json body;
};

/// JSON API over the detector, pattern list and alarm queue. The handlers
/// take and return JSON so they can be exercised without a socket; `mount`
/// wires them onto an HTTP server.
class DetectionService {
public:
    // Loads both files; throws their parse errors before anything binds.
    explicit DetectionService(ServiceConfig config, Clock clock = utc_now);
    DetectionService(ServiceConfig config, PatternStore store, AlarmQueue alarms);

    ApiResponse check(std::string_view body);
    ApiResponse list_patterns() const;
    ApiResponse add_pattern(std::string_view body);
    ApiResponse list_alarms(std::optional<std::string_view> status) const;
    ApiResponse decide_alarm(std::string_view id, std::string_view body);
    ApiResponse health() const;

    void mount(httplib::Server& server);

    const ServiceConfig& config() const noexcept { return config_; }
    PatternStore& store() noexcept { return store_; }
    AlarmQueue& alarms() noexcept { return alarms_; }

private:
    nlohmann::json alarm_json(const AlarmRecord& record, const PatternSnapshot& snapshot) const;

    ServiceConfig config_;
    PatternStore store_;
    AlarmQueue alarms_;
};

nlohmann::json pattern_json(const AnomalyPattern& pattern);
// {"verdict", "score", and "pattern_id"/"match_end" for rejected and alarm verdicts}
nlohmann::json verdict_json(const Verdict& verdict);

}  // namespace sqlia
