#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "chronogate/policy.hpp"
#include "chronogate/time_util.hpp"

namespace chronogate::proxy {

enum class EventLevel {
    Decision,
    Alert,
    Drop,
};

// One structured record per policy decision; serialized as a single JSONL
// line with a stable field set.
struct LogEvent {
    UnixTime ts = 0;
    EventLevel level = EventLevel::Decision;
    std::string qname;
    std::optional<std::uint16_t> qtype;
    std::optional<policy::Action> action;
    std::optional<policy::Reason> reason;
    std::optional<double> age_hours;
    std::optional<age::AgeSource> source;
    std::string client;
    std::optional<std::uint8_t> upstream_rcode;
    double latency_ms = 0.0;
    std::optional<std::string> note;
};

std::string to_jsonl(const LogEvent& event);

}  // namespace chronogate::proxy
