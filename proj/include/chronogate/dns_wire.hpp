#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chronogate::wire {

enum class DecodeErrc {
    Truncated,
    BadPointer,
    LabelTooLong,
    NameTooLong,
};

class DecodeError : public std::runtime_error {
public:
    DecodeError(DecodeErrc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    DecodeErrc code() const { return code_; }

private:
    DecodeErrc code_;
};

class EncodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotAQuery : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A domain name as an ordered list of labels, root label omitted.
// Comparison is ASCII-case-insensitive; canonical form is lowercase.
class DnsName {
public:
    DnsName() = default;
    explicit DnsName(std::vector<std::string> labels);

    // Parses dotted presentation form ("example.com", trailing dot allowed).
    static DnsName from_string(const std::string& text);

    const std::vector<std::string>& labels() const { return labels_; }
    bool is_root() const { return labels_.empty(); }

    // Length of the wire encoding including length octets and the root byte.
    std::size_t encoded_length() const;

    std::string to_string() const;  // dotted, lowercase ("." for root)
    DnsName lowered() const;

    // Case-insensitive.
    bool operator==(const DnsName& other) const;
    bool operator!=(const DnsName& other) const { return !(*this == other); }

private:
    std::vector<std::string> labels_;
};

struct DnsHeader {
    std::uint16_t id = 0;
    bool qr = false;
    std::uint8_t opcode = 0;
    bool aa = false;
    bool tc = false;
    bool rd = false;
    bool ra = false;
    std::uint8_t rcode = 0;
    std::uint16_t qdcount = 0;
    std::uint16_t ancount = 0;
    std::uint16_t nscount = 0;
    std::uint16_t arcount = 0;

    bool operator==(const DnsHeader&) const = default;
};

constexpr std::uint8_t kRcodeNoError = 0;
constexpr std::uint8_t kRcodeFormErr = 1;
constexpr std::uint8_t kRcodeServFail = 2;
constexpr std::uint8_t kRcodeNxDomain = 3;

constexpr std::uint16_t kTypeA = 1;
constexpr std::uint16_t kTypeSoa = 6;
constexpr std::uint16_t kTypeAaaa = 28;
constexpr std::uint16_t kClassIn = 1;

struct Question {
    DnsName qname;
    std::uint16_t qtype = kTypeA;
    std::uint16_t qclass = kClassIn;

    bool operator==(const Question&) const = default;
};

struct ARdata {
    std::array<std::uint8_t, 4> addr{};
    bool operator==(const ARdata&) const = default;
};

struct SoaRdata {
    DnsName mname;
    DnsName rname;
    std::uint32_t serial = 0;
    std::uint32_t refresh = 0;
    std::uint32_t retry = 0;
    std::uint32_t expire = 0;
    std::uint32_t minimum = 0;
    bool operator==(const SoaRdata&) const = default;
};

struct OpaqueRdata {
    std::vector<std::uint8_t> bytes;
    bool operator==(const OpaqueRdata&) const = default;
};

using Rdata = std::variant<ARdata, SoaRdata, OpaqueRdata>;

struct ResourceRecord {
    DnsName name;
    std::uint16_t rtype = 0;
    std::uint16_t rclass = kClassIn;
    std::uint32_t ttl = 0;
    Rdata rdata = OpaqueRdata{};

    bool operator==(const ResourceRecord&) const = default;
};

struct DnsMessage {
    DnsHeader header;
    std::vector<Question> questions;
    std::vector<ResourceRecord> answers;
    std::vector<ResourceRecord> authorities;
    std::vector<ResourceRecord> additionals;

    bool operator==(const DnsMessage&) const = default;
};

// Decodes a full message; compression pointers are followed, loops and
// forward pointers rejected. Throws DecodeError.
DnsMessage decode_message(std::span<const std::uint8_t> wire);

// Encodes with uncompressed names. Throws EncodeError (NameTooLong).
std::vector<std::uint8_t> encode_message(const DnsMessage& msg);

// Builds the NXDOMAIN block response: same id, qr=1, rcode=3, question
// echoed, empty answers, synthetic SOA in authority with minimum=ttl_hint.
DnsMessage synthesize_nxdomain(const DnsMessage& query, std::uint32_t ttl_hint);

// First SOA rdata found in answers, then authorities.
std::optional<SoaRdata> extract_soa(const DnsMessage& msg);

}  // namespace chronogate::wire
