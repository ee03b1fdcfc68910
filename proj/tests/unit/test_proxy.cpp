#include <doctest.h>

#include <random>

#include "chronogate/resolver_proxy.hpp"

using namespace chronogate;
using namespace chronogate::proxy;

namespace {

const UnixTime kNow = *parse_iso8601_utc("2017-08-24T12:00:00Z");

// Scripted upstream: answers every query with a fixed A record unless told
// to time out or scramble the response id.
class FakeUpstream : public UpstreamTransport {
public:
    std::optional<Bytes> exchange(const Bytes& query) override {
        ++packets;
        if (mode == Mode::Timeout) return std::nullopt;
        wire::DnsMessage q = wire::decode_message(query);
        wire::DnsMessage resp;
        resp.header.id = mode == Mode::WrongId ? static_cast<std::uint16_t>(q.header.id + 1)
                                               : q.header.id;
        resp.header.qr = true;
        resp.header.rd = q.header.rd;
        resp.header.ra = true;
        resp.questions = q.questions;
        resp.header.qdcount = static_cast<std::uint16_t>(resp.questions.size());
        if (!q.questions.empty() && q.questions[0].qtype == wire::kTypeSoa) {
            wire::ResourceRecord rr;
            rr.name = q.questions[0].qname;
            rr.rtype = wire::kTypeSoa;
            rr.ttl = 300;
            wire::SoaRdata soa;
            soa.serial = soa_serial;
            rr.rdata = soa;
            resp.answers.push_back(rr);
            resp.header.ancount = 1;
        } else if (!q.questions.empty()) {
            wire::ResourceRecord rr;
            rr.name = q.questions[0].qname;
            rr.rtype = wire::kTypeA;
            rr.ttl = 300;
            rr.rdata = wire::ARdata{{192, 0, 2, 7}};
            resp.answers.push_back(rr);
            resp.header.ancount = 1;
        }
        return wire::encode_message(resp);
    }

    enum class Mode { Answer, Timeout, WrongId };
    Mode mode = Mode::Answer;
    std::uint32_t soa_serial = 2017082401;
    int packets = 0;
};

Bytes make_query(const std::string& domain, std::uint16_t id = 0x4242) {
    wire::DnsMessage msg;
    msg.header.id = id;
    msg.header.rd = true;
    wire::Question q;
    q.qname = wire::DnsName::from_string(domain);
    msg.questions.push_back(q);
    msg.header.qdcount = 1;
    return wire::encode_message(msg);
}

struct Fixture {
    Fixture() {
        auto index = std::make_shared<age::AgeIndex>();
        index->insert("young.test", kNow - 3 * kSecondsPerHour);
        index->insert("old.test", kNow - 48 * kSecondsPerHour);
        state.index = index;
        state.upstream = &upstream;
    }

    FakeUpstream upstream;
    ProxyState state;
};

}  // namespace

TEST_CASE("blocked query yields NXDOMAIN and zero upstream packets") {
    Fixture f;
    auto outcome = handle_query(make_query("young.test"), "127.0.0.1:5000", kNow, f.state);
    REQUIRE(outcome.response);
    auto resp = wire::decode_message(*outcome.response);
    CHECK(resp.header.id == 0x4242);
    CHECK(resp.header.qr);
    CHECK(resp.header.rcode == wire::kRcodeNxDomain);
    CHECK(resp.header.ancount == 0);
    CHECK(f.upstream.packets == 0);
    REQUIRE(outcome.events.size() == 1);
    CHECK(outcome.events[0].action == policy::Action::Block);
    CHECK(outcome.events[0].reason == policy::Reason::YoungDomain);
    CHECK(outcome.events[0].age_hours == doctest::Approx(3.0));
}

TEST_CASE("unknown domain is relayed from upstream") {
    Fixture f;
    auto outcome = handle_query(make_query("somewhere.example"), "c", kNow, f.state);
    REQUIRE(outcome.response);
    auto resp = wire::decode_message(*outcome.response);
    CHECK(resp.header.id == 0x4242);
    CHECK(resp.header.rcode == wire::kRcodeNoError);
    REQUIRE(resp.answers.size() == 1);
    CHECK(std::get<wire::ARdata>(resp.answers[0].rdata).addr ==
          std::array<std::uint8_t, 4>{192, 0, 2, 7});
    CHECK(f.upstream.packets == 1);
    CHECK(outcome.events[0].action == policy::Action::Allow);
    CHECK(outcome.events[0].reason == policy::Reason::UnknownAge);
    CHECK(outcome.events[0].upstream_rcode == 0);
}

TEST_CASE("old feed domain is relayed") {
    Fixture f;
    auto outcome = handle_query(make_query("old.test"), "c", kNow, f.state);
    REQUIRE(outcome.response);
    CHECK(outcome.events[0].reason == policy::Reason::OldDomain);
    CHECK(f.upstream.packets == 1);
}

TEST_CASE("garbage shorter than a header is dropped with a log event") {
    Fixture f;
    Bytes junk = {1, 2, 3, 4, 5};
    auto outcome = handle_query(junk, "c", kNow, f.state);
    CHECK(!outcome.response);
    REQUIRE(outcome.events.size() == 1);
    CHECK(outcome.events[0].level == EventLevel::Drop);
    CHECK(f.upstream.packets == 0);
}

TEST_CASE("malformed body with a readable header gets FORMERR") {
    Fixture f;
    Bytes wire_bytes(12, 0);
    wire_bytes[0] = 0xAB;
    wire_bytes[1] = 0xCD;
    wire_bytes[5] = 1;  // claims one question, none present
    auto outcome = handle_query(wire_bytes, "c", kNow, f.state);
    REQUIRE(outcome.response);
    auto resp = wire::decode_message(*outcome.response);
    CHECK(resp.header.id == 0xABCD);
    CHECK(resp.header.rcode == wire::kRcodeFormErr);
    CHECK(f.upstream.packets == 0);
}

TEST_CASE("inbound responses and empty questions get FORMERR") {
    Fixture f;
    auto q = make_query("x.example");
    q[2] |= 0x80;  // set qr
    auto outcome = handle_query(q, "c", kNow, f.state);
    REQUIRE(outcome.response);
    CHECK(wire::decode_message(*outcome.response).header.rcode == wire::kRcodeFormErr);

    wire::DnsMessage empty;
    empty.header.id = 9;
    auto outcome2 = handle_query(wire::encode_message(empty), "c", kNow, f.state);
    REQUIRE(outcome2.response);
    CHECK(wire::decode_message(*outcome2.response).header.rcode == wire::kRcodeFormErr);
}

TEST_CASE("upstream timeout becomes SERVFAIL; blocks still work without upstream") {
    Fixture f;
    f.upstream.mode = FakeUpstream::Mode::Timeout;

    auto allowed = handle_query(make_query("somewhere.example"), "c", kNow, f.state);
    REQUIRE(allowed.response);
    CHECK(wire::decode_message(*allowed.response).header.rcode == wire::kRcodeServFail);

    auto blocked = handle_query(make_query("young.test"), "c", kNow, f.state);
    REQUIRE(blocked.response);
    CHECK(wire::decode_message(*blocked.response).header.rcode == wire::kRcodeNxDomain);
}

TEST_CASE("upstream id mismatch is discarded as SERVFAIL") {
    Fixture f;
    f.upstream.mode = FakeUpstream::Mode::WrongId;
    auto outcome = handle_query(make_query("somewhere.example"), "c", kNow, f.state);
    REQUIRE(outcome.response);
    auto resp = wire::decode_message(*outcome.response);
    CHECK(resp.header.rcode == wire::kRcodeServFail);
    CHECK(resp.header.id == 0x4242);
}

TEST_CASE("alert-only emits a second, alert-level event and still answers") {
    Fixture f;
    f.state.policy.young_action = policy::Action::AlertOnly;
    auto outcome = handle_query(make_query("young.test"), "c", kNow, f.state);
    REQUIRE(outcome.response);
    CHECK(wire::decode_message(*outcome.response).header.rcode == wire::kRcodeNoError);
    REQUIRE(outcome.events.size() == 2);
    CHECK(outcome.events[0].level == EventLevel::Decision);
    CHECK(outcome.events[1].level == EventLevel::Alert);
    CHECK(f.upstream.packets == 1);
}

TEST_CASE("soa probe candidates are emitted off the feed path only") {
    Fixture f;
    auto feed_hit = handle_query(make_query("young.test"), "c", kNow, f.state);
    CHECK(feed_hit.probe_candidates.empty());

    auto unknown = handle_query(make_query("a.b.mystery.example"), "c", kNow, f.state);
    REQUIRE(unknown.probe_candidates.size() == 1);
    CHECK(unknown.probe_candidates[0] == "mystery.example");
}

TEST_CASE("soa probe populates the cache for future lookups") {
    Fixture f;
    run_soa_probe("mystery.example", kNow, f.state);
    CHECK(f.upstream.packets == 1);
    auto v = age::lookup_age("mystery.example", kNow, *f.state.index, &f.state.soa_cache);
    REQUIRE(v.known);
    CHECK(v.source == age::AgeSource::Cache);
    CHECK(v.age_seconds == 12 * kSecondsPerHour);

    // Once cached, the query path schedules no further probes.
    auto again = handle_query(make_query("mystery.example"), "c", kNow, f.state);
    CHECK(again.probe_candidates.empty());
}

TEST_CASE("failed probe sets a one-hour negative entry") {
    Fixture f;
    f.upstream.mode = FakeUpstream::Mode::Timeout;
    run_soa_probe("silent.example", kNow, f.state);
    CHECK(f.state.soa_cache.probe_suppressed("silent.example", kNow + 30 * 60));
    CHECK(!f.state.soa_cache.probe_suppressed("silent.example", kNow + 2 * kSecondsPerHour));

    auto soon = handle_query(make_query("silent.example"), "c", kNow + 60, f.state);
    CHECK(soon.probe_candidates.empty());
}

TEST_CASE("every datagram produces at least one event, never a crash") {
    Fixture f;
    std::mt19937_64 rng(123);
    std::size_t events = 0;
    const int datagrams = 20000;
    for (int i = 0; i < datagrams; ++i) {
        Bytes junk(rng() % 128);
        for (auto& b : junk) b = static_cast<std::uint8_t>(rng());
        auto outcome = handle_query(junk, "c", kNow, f.state);
        CHECK(!outcome.events.empty());
        events += outcome.events.empty() ? 0 : 1;
    }
    CHECK(events == datagrams);
}

TEST_CASE("log events serialize as single-line json") {
    LogEvent e;
    e.ts = kNow;
    e.qname = "young.test";
    e.qtype = 1;
    e.action = policy::Action::Block;
    e.reason = policy::Reason::YoungDomain;
    e.age_hours = 3.0;
    e.source = age::AgeSource::Feed;
    e.client = "127.0.0.1:5000";
    std::string line = to_jsonl(e);
    CHECK(line.find('\n') == std::string::npos);
    CHECK(line.find("\"qname\":\"young.test\"") != std::string::npos);
    CHECK(line.find("\"action\":\"block\"") != std::string::npos);
    CHECK(line.find("\"reason\":\"young_domain\"") != std::string::npos);
    CHECK(line.find("\"ts\":\"2017-08-24T12:00:00Z\"") != std::string::npos);
}
