#include "chronogate/resolver_proxy.hpp"

#include <chrono>

#include "chronogate/dns_wire.hpp"

namespace chronogate::proxy {

namespace {

LogEvent base_event(UnixTime now, const std::string& client) {
    LogEvent e;
    e.ts = now;
    e.client = client;
    return e;
}

Bytes formerr_response(std::uint16_t id) {
    wire::DnsMessage resp;
    resp.header.id = id;
    resp.header.qr = true;
    resp.header.rcode = wire::kRcodeFormErr;
    return wire::encode_message(resp);
}

Bytes servfail_response(const wire::DnsMessage& query) {
    wire::DnsMessage resp;
    resp.header.id = query.header.id;
    resp.header.qr = true;
    resp.header.rd = query.header.rd;
    resp.header.ra = true;
    resp.header.rcode = wire::kRcodeServFail;
    resp.questions = query.questions;
    resp.header.qdcount = static_cast<std::uint16_t>(resp.questions.size());
    return wire::encode_message(resp);
}

std::uint16_t raw_id(std::span<const std::uint8_t> wire) {
    return static_cast<std::uint16_t>(wire[0] << 8 | wire[1]);
}

void patch_id(Bytes& wire, std::uint16_t id) {
    wire[0] = static_cast<std::uint8_t>(id >> 8);
    wire[1] = static_cast<std::uint8_t>(id);
}

}  // namespace

UnixTime SystemTimeSource::now() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

QueryOutcome handle_query(std::span<const std::uint8_t> wire_bytes, const std::string& client,
                          UnixTime now, ProxyState& state) {
    QueryOutcome outcome;
    if (wire_bytes.size() < 12) {
        LogEvent e = base_event(now, client);
        e.level = EventLevel::Drop;
        e.note = "datagram shorter than a DNS header";
        outcome.events.push_back(std::move(e));
        return outcome;
    }

    wire::DnsMessage query;
    try {
        query = wire::decode_message(wire_bytes);
    } catch (const wire::DecodeError& err) {
        LogEvent e = base_event(now, client);
        e.note = std::string("malformed query: ") + err.what();
        outcome.events.push_back(std::move(e));
        outcome.response = formerr_response(raw_id(wire_bytes));
        return outcome;
    }

    if (query.header.qr || query.questions.empty()) {
        LogEvent e = base_event(now, client);
        e.note = query.header.qr ? "qr flag set on inbound datagram" : "query has no question";
        outcome.events.push_back(std::move(e));
        outcome.response = formerr_response(query.header.id);
        return outcome;
    }

    // Policy keys on the first question only.
    const wire::Question& question = query.questions.front();
    const std::string qname = question.qname.to_string();

    age::AgeVerdict verdict =
        age::lookup_age(qname, now, *state.index, &state.soa_cache);
    policy::PolicyVerdict pv = policy::evaluate(qname, verdict, state.policy);

    LogEvent e = base_event(now, client);
    e.qname = qname;
    e.qtype = question.qtype;
    e.action = pv.action;
    e.reason = pv.reason;
    if (pv.age_seconds) e.age_hours = static_cast<double>(*pv.age_seconds) / kSecondsPerHour;
    e.source = pv.source;
    if (query.questions.size() > 1) e.note = "multi-question query; first question evaluated";

    if (state.soa_probe_enabled &&
        (!verdict.known || verdict.source != age::AgeSource::Feed)) {
        const std::string apex = age::registrable_domain(qname);
        if (!apex.empty() && !state.soa_cache.probe_suppressed(apex, now)) {
            outcome.probe_candidates.push_back(apex);
        }
    }

    if (pv.action == policy::Action::Block) {
        auto resp = wire::synthesize_nxdomain(query, state.policy.block_ttl_seconds);
        outcome.response = wire::encode_message(resp);
        outcome.events.push_back(std::move(e));
        return outcome;
    }

    // Allow and AlertOnly both forward; the upstream exchange uses a fresh
    // random id, verified on receipt and rewritten back for the client.
    const auto t0 = std::chrono::steady_clock::now();
    Bytes forwarded(wire_bytes.begin(), wire_bytes.end());
    const std::uint16_t fresh_id = static_cast<std::uint16_t>(state.id_rng());
    patch_id(forwarded, fresh_id);

    std::optional<Bytes> upstream_resp;
    if (state.upstream) upstream_resp = state.upstream->exchange(forwarded);
    if (upstream_resp && (upstream_resp->size() < 12 || raw_id(*upstream_resp) != fresh_id)) {
        upstream_resp.reset();
    }
    e.latency_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();

    if (upstream_resp) {
        patch_id(*upstream_resp, query.header.id);
        e.upstream_rcode = static_cast<std::uint8_t>((*upstream_resp)[3] & 0xF);
        outcome.response = std::move(*upstream_resp);
    } else {
        e.upstream_rcode = wire::kRcodeServFail;
        outcome.response = servfail_response(query);
    }

    if (pv.action == policy::Action::AlertOnly) {
        LogEvent alert = e;
        alert.level = EventLevel::Alert;
        alert.note = "young or flagged domain answered in alert-only mode";
        outcome.events.push_back(std::move(e));
        outcome.events.push_back(std::move(alert));
    } else {
        outcome.events.push_back(std::move(e));
    }
    return outcome;
}

Bytes build_soa_probe(const std::string& domain, std::uint16_t id) {
    wire::DnsMessage msg;
    msg.header.id = id;
    msg.header.rd = true;
    wire::Question q;
    q.qname = wire::DnsName::from_string(domain);
    q.qtype = wire::kTypeSoa;
    msg.questions.push_back(std::move(q));
    msg.header.qdcount = 1;
    return wire::encode_message(msg);
}

void run_soa_probe(const std::string& domain, UnixTime now, ProxyState& state) {
    const std::uint16_t id = static_cast<std::uint16_t>(state.id_rng());
    std::optional<Bytes> resp;
    if (state.upstream) resp = state.upstream->exchange(build_soa_probe(domain, id));

    if (resp && resp->size() >= 12 && raw_id(*resp) == id) {
        try {
            auto msg = wire::decode_message(*resp);
            if (auto soa = wire::extract_soa(msg)) {
                if (age::apply_soa_heuristic(*soa, domain, now, state.soa_cache)) return;
            }
        } catch (const wire::DecodeError&) {
            // fall through to the negative entry
        }
    }
    state.soa_cache.note_probe_failure(domain, now + kSecondsPerHour);
}

}  // namespace chronogate::proxy
