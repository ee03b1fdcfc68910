#include "chronogate/log_event.hpp"

#include <nlohmann/json.hpp>

namespace chronogate::proxy {

namespace {

const char* level_name(EventLevel level) {
    switch (level) {
        case EventLevel::Decision: return "decision";
        case EventLevel::Alert: return "alert";
        case EventLevel::Drop: return "drop";
    }
    return "?";
}

const char* source_name(age::AgeSource s) {
    switch (s) {
        case age::AgeSource::Feed: return "feed";
        case age::AgeSource::SoaHeuristic: return "soa_heuristic";
        case age::AgeSource::Cache: return "cache";
    }
    return "?";
}

}  // namespace

std::string to_jsonl(const LogEvent& event) {
    nlohmann::ordered_json j;
    j["ts"] = format_iso8601_utc(event.ts);
    j["level"] = level_name(event.level);
    j["qname"] = event.qname;
    if (event.qtype) j["qtype"] = *event.qtype;
    if (event.action) j["action"] = policy::to_string(*event.action);
    if (event.reason) j["reason"] = policy::to_string(*event.reason);
    if (event.age_hours) j["age_hours"] = *event.age_hours;
    if (event.source) j["source"] = source_name(*event.source);
    j["client"] = event.client;
    if (event.upstream_rcode) j["upstream_rcode"] = *event.upstream_rcode;
    j["latency_ms"] = event.latency_ms;
    if (event.note) j["note"] = *event.note;
    return j.dump();
}

}  // namespace chronogate::proxy
