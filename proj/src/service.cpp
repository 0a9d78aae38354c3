#include "sqlia/service.hpp"

#include <charconv>
#include <httplib.h>

#include "sqlia/error.hpp"

namespace sqlia {

using nlohmann::json;

namespace {

ApiResponse error_response(int status, std::string_view message) {
    return {status, json{{"error", message}}};
}

std::optional<json> parse_object(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::optional<AlarmPolicy> parse_alarm_policy(std::string_view text) noexcept {
    if (text == "allow") return AlarmPolicy::AllowAndLog;
    if (text == "block") return AlarmPolicy::Block;
    return std::nullopt;
}

std::optional<ListenAddress> parse_listen_address(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto port = parse_u64(text.substr(colon + 1));
    if (!port || *port > 65535) return std::nullopt;
    ListenAddress addr;
    addr.host = std::string(text.substr(0, colon));
    if (addr.host.empty()) addr.host = "0.0.0.0";
    addr.port = static_cast<int>(*port);
    return addr;
}

json verdict_json(const Verdict& verdict) {
    json out;
    out["verdict"] = to_string(verdict.kind());
    out["score"] = verdict.score().to_fixed6();
    if (const auto* r = std::get_if<Rejected>(&verdict.outcome)) {
        out["pattern_id"] = r->pattern_id;
        out["match_end"] = r->match_end;
    } else if (const auto* a = std::get_if<Alarm>(&verdict.outcome)) {
        out["pattern_id"] = a->best_pattern_id;
        out["match_end"] = a->max_depth_end;
    }
    return out;
}

json pattern_json(const AnomalyPattern& p) {
    return {{"id", p.id},
            {"text", p.text.str()},
            {"source", to_string(p.source)},
            {"created_at", format_utc(p.created_at)}};
}

DetectionService::DetectionService(ServiceConfig config, Clock clock)
    : DetectionService(config, PatternStore::load(config.pattern_file, clock),
                       AlarmQueue::load(config.alarm_file, clock)) {}

DetectionService::DetectionService(ServiceConfig config, PatternStore store, AlarmQueue alarms)
    : config_(std::move(config)), store_(std::move(store)), alarms_(std::move(alarms)) {
    validate(config_.detector);
}

ApiResponse DetectionService::check(std::string_view body) {
    const auto req = parse_object(body);
    if (!req || !req->contains("query") || !(*req)["query"].is_string()) {
        return error_response(400, "body must be a JSON object with a string \"query\"");
    }
    const auto& query = (*req)["query"].get_ref<const std::string&>();

    Verdict verdict;
    try {
        verdict = check_query(query, store_.snapshot(), config_.detector);
    } catch (const InvalidEncoding& e) {
        return error_response(400, e.what());
    }

    json out = verdict_json(verdict);
    if (verdict.kind() == VerdictKind::Alarm) {
        try {
            out["alarm_id"] = alarms_.raise_alarm(query, verdict).id;
        } catch (const IoFailure& e) {
            return error_response(500, e.what());
        }
        if (config_.alarm_policy == AlarmPolicy::Block) out["verdict"] = "rejected";
    }
    return {200, out};
}

ApiResponse DetectionService::list_patterns() const {
    json list = json::array();
    for (const auto& p : store_.patterns()) list.push_back(pattern_json(p));
    return {200, json{{"patterns", list}}};
}

ApiResponse DetectionService::add_pattern(std::string_view body) {
    const auto req = parse_object(body);
    if (!req || !req->contains("text") || !(*req)["text"].is_string()) {
        return error_response(400, "body must be a JSON object with a string \"text\"");
    }
    try {
        const auto added =
            store_.add_pattern((*req)["text"].get_ref<const std::string&>(), PatternSource::AdminConfirmed);
        json out = pattern_json(added.pattern);
        out["created"] = added.created;
        return {added.created ? 201 : 200, out};
    } catch (const EmptyPattern& e) {
        return error_response(400, e.what());
    } catch (const InvalidEncoding& e) {
        return error_response(400, e.what());
    } catch (const IoFailure& e) {
        return error_response(500, e.what());
    }
}

json DetectionService::alarm_json(const AlarmRecord& r, const PatternSnapshot& snapshot) const {
    json j = {
        {"id", r.id},
        {"raw_query", r.raw_query},
        {"normalized_query", r.normalized_query.str()},
        {"score", r.score.to_fixed6()},
        {"best_pattern_id", r.best_pattern_id},
        {"status", to_string(r.status)},
        {"raised_at", format_utc(r.raised_at)},
        {"suggested_pattern", suggest_pattern(r).str()},
    };
    if (r.new_pattern_id) j["new_pattern_id"] = *r.new_pattern_id;
    if (r.decided_at) j["decided_at"] = format_utc(*r.decided_at);
    for (const auto& cp : *snapshot) {
        if (cp.pattern.id != r.best_pattern_id) continue;
        const auto scan = cp.automaton.scan(r.normalized_query);
        j["best_pattern_text"] = cp.pattern.text.str();
        j["highlight"] = {{"start", scan.max_depth_end - scan.max_depth}, {"end", scan.max_depth_end}};
        break;
    }
    return j;
}

ApiResponse DetectionService::list_alarms(std::optional<std::string_view> status) const {
    std::optional<AlarmStatus> filter;
    if (status) {
        filter = parse_alarm_status(*status);
        if (!filter) return error_response(400, "status must be pending, confirmed or dismissed");
    }
    const auto snapshot = store_.snapshot();
    json list = json::array();
    for (const auto& r : alarms_.list(filter)) list.push_back(alarm_json(r, snapshot));
    return {200, json{{"alarms", list}}};
}

ApiResponse DetectionService::decide_alarm(std::string_view id_text, std::string_view body) {
    const auto id = parse_u64(id_text);
    if (!id) return error_response(404, "unknown alarm");
    const auto req = parse_object(body);
    if (!req || !req->contains("action") || !(*req)["action"].is_string()) {
        return error_response(400, "body must be a JSON object with a string \"action\"");
    }
    const auto& action = (*req)["action"].get_ref<const std::string&>();
    Decision decision;
    if (action == "confirm") {
        auto it = req->find("pattern_text");
        if (it == req->end() || !it->is_string()) return error_response(400, "confirm requires pattern_text");
        decision = ConfirmDecision{it->get<std::string>()};
    } else if (action == "dismiss") {
        decision = DismissDecision{};
    } else {
        return error_response(400, "action must be confirm or dismiss");
    }

    try {
        const auto updated = alarms_.decide(*id, decision, store_);
        return {200, alarm_json(updated, store_.snapshot())};
    } catch (const UnknownAlarm& e) {
        return error_response(404, e.what());
    } catch (const AlreadyDecided& e) {
        return error_response(409, e.what());
    } catch (const EmptyPattern& e) {
        return error_response(400, e.what());
    } catch (const InvalidEncoding& e) {
        return error_response(400, e.what());
    } catch (const IoFailure& e) {
        return error_response(500, e.what());
    }
}

ApiResponse DetectionService::health() const {
    return {200, json{{"status", "ok"}, {"patterns", store_.size()}, {"pending_alarms", alarms_.pending_count()}}};
}

void DetectionService::mount(httplib::Server& server) {
    auto reply = [](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_content(api.body.dump(), "application/json");
    };

    server.Post("/v1/check", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, check(req.body));
    });
    server.Get("/v1/patterns", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, list_patterns());
    });
    server.Post("/v1/patterns", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, add_pattern(req.body));
    });
    server.Get("/v1/alarms", [this, reply](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string_view> status;
        std::string value;
        if (req.has_param("status")) {
            value = req.get_param_value("status");
            status = value;
        }
        reply(res, list_alarms(status));
    });
    server.Post(R"(/v1/alarms/([^/]+)/decision)", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, decide_alarm(req.matches[1].str(), req.body));
    });
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, health());
    });
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.set_post_routing_handler([origin = config_.cors_origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            if (ep) std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply(res, error_response(500, message));
    });
}

}  // namespace sqlia
