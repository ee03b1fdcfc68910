#include "chronogate/dns_wire.hpp"

#include <algorithm>
#include <cctype>

namespace chronogate::wire {

namespace {

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

void check_name_limits(const std::vector<std::string>& labels) {
    std::size_t total = 1;  // root byte
    for (const auto& l : labels) {
        if (l.empty() || l.size() > 63) {
            throw EncodeError("label length out of range 1..63");
        }
        total += 1 + l.size();
    }
    if (total > 255) throw EncodeError("encoded name exceeds 255 bytes");
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> buf) : buf_(buf) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

    std::uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(buf_[pos_] << 8 | buf_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | buf_[pos_ + i];
        pos_ += 4;
        return v;
    }
    std::vector<std::uint8_t> bytes(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    DnsName name() {
        std::vector<std::string> labels;
        std::size_t encoded = 1;
        std::size_t jumps = 0;
        std::size_t return_pos = 0;
        bool jumped = false;
        for (;;) {
            std::size_t label_start = pos_;
            std::uint8_t len = u8();
            if ((len & 0xC0) == 0xC0) {
                std::uint16_t target = static_cast<std::uint16_t>((len & 0x3F) << 8 | u8());
                // Pointers must point strictly backwards; this also kills loops,
                // but cap the jump count in case of pathological chains.
                if (target >= label_start || ++jumps > 64) {
                    throw DecodeError(DecodeErrc::BadPointer, "bad compression pointer");
                }
                if (!jumped) {
                    return_pos = pos_;
                    jumped = true;
                }
                pos_ = target;
                continue;
            }
            if (len & 0xC0) {
                throw DecodeError(DecodeErrc::BadPointer, "reserved label type");
            }
            if (len == 0) break;
            if (len > 63) throw DecodeError(DecodeErrc::LabelTooLong, "label over 63 bytes");
            encoded += 1 + len;
            if (encoded > 255) throw DecodeError(DecodeErrc::NameTooLong, "name over 255 bytes");
            auto raw = bytes(len);
            labels.emplace_back(raw.begin(), raw.end());
        }
        if (jumped) pos_ = return_pos;
        return DnsName(std::move(labels));
    }

private:
    void need(std::size_t n) {
        if (pos_ + n > buf_.size()) {
            throw DecodeError(DecodeErrc::Truncated, "ran out of bytes");
        }
    }

    std::span<const std::uint8_t> buf_;
    std::size_t pos_ = 0;
};

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v));
    }
    void u32(std::uint32_t v) {
        for (int i = 3; i >= 0; --i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

    void name(const DnsName& n) {
        check_name_limits(n.labels());
        for (const auto& l : n.labels()) {
            u8(static_cast<std::uint8_t>(l.size()));
            for (char c : l) out_.push_back(static_cast<std::uint8_t>(c));
        }
        u8(0);
    }

    std::size_t size() const { return out_.size(); }
    void patch_u16(std::size_t at, std::uint16_t v) {
        out_[at] = static_cast<std::uint8_t>(v >> 8);
        out_[at + 1] = static_cast<std::uint8_t>(v);
    }

    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

Question decode_question(Reader& r) {
    Question q;
    q.qname = r.name();
    q.qtype = r.u16();
    q.qclass = r.u16();
    return q;
}

ResourceRecord decode_rr(Reader& r) {
    ResourceRecord rr;
    rr.name = r.name();
    rr.rtype = r.u16();
    rr.rclass = r.u16();
    rr.ttl = r.u32();
    std::uint16_t rdlength = r.u16();
    std::size_t rdata_end = r.pos() + rdlength;
    if (rr.rtype == kTypeSoa) {
        SoaRdata soa;
        soa.mname = r.name();
        soa.rname = r.name();
        soa.serial = r.u32();
        soa.refresh = r.u32();
        soa.retry = r.u32();
        soa.expire = r.u32();
        soa.minimum = r.u32();
        if (r.pos() != rdata_end) {
            throw DecodeError(DecodeErrc::Truncated, "SOA rdata length mismatch");
        }
        rr.rdata = std::move(soa);
    } else if (rr.rtype == kTypeA && rdlength == 4) {
        ARdata a;
        auto raw = r.bytes(4);
        std::copy(raw.begin(), raw.end(), a.addr.begin());
        rr.rdata = a;
    } else {
        rr.rdata = OpaqueRdata{r.bytes(rdlength)};
    }
    return rr;
}

void encode_rr(Writer& w, const ResourceRecord& rr) {
    w.name(rr.name);
    w.u16(rr.rtype);
    w.u16(rr.rclass);
    w.u32(rr.ttl);
    std::size_t len_at = w.size();
    w.u16(0);  // rdlength, patched below
    std::size_t rdata_start = w.size();
    if (const auto* a = std::get_if<ARdata>(&rr.rdata)) {
        w.bytes(a->addr);
    } else if (const auto* soa = std::get_if<SoaRdata>(&rr.rdata)) {
        w.name(soa->mname);
        w.name(soa->rname);
        w.u32(soa->serial);
        w.u32(soa->refresh);
        w.u32(soa->retry);
        w.u32(soa->expire);
        w.u32(soa->minimum);
    } else {
        w.bytes(std::get<OpaqueRdata>(rr.rdata).bytes);
    }
    std::size_t rdlength = w.size() - rdata_start;
    if (rdlength > 0xFFFF) throw EncodeError("rdata over 65535 bytes");
    w.patch_u16(len_at, static_cast<std::uint16_t>(rdlength));
}

}  // namespace

DnsName::DnsName(std::vector<std::string> labels) : labels_(std::move(labels)) {}

DnsName DnsName::from_string(const std::string& text) {
    std::vector<std::string> labels;
    if (text.empty() || text == ".") return DnsName{};
    std::string cur;
    for (char c : text) {
        if (c == '.') {
            labels.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) labels.push_back(cur);
    return DnsName(std::move(labels));
}

std::size_t DnsName::encoded_length() const {
    std::size_t total = 1;
    for (const auto& l : labels_) total += 1 + l.size();
    return total;
}

std::string DnsName::to_string() const {
    if (labels_.empty()) return ".";
    std::string out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (i) out.push_back('.');
        for (char c : labels_[i]) out.push_back(ascii_lower(c));
    }
    return out;
}

DnsName DnsName::lowered() const {
    std::vector<std::string> labels = labels_;
    for (auto& l : labels) {
        std::transform(l.begin(), l.end(), l.begin(), ascii_lower);
    }
    return DnsName(std::move(labels));
}

bool DnsName::operator==(const DnsName& other) const {
    if (labels_.size() != other.labels_.size()) return false;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        const auto& a = labels_[i];
        const auto& b = other.labels_[i];
        if (a.size() != b.size()) return false;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (ascii_lower(a[j]) != ascii_lower(b[j])) return false;
        }
    }
    return true;
}

DnsMessage decode_message(std::span<const std::uint8_t> wire) {
    if (wire.size() < 12) {
        throw DecodeError(DecodeErrc::Truncated, "shorter than DNS header");
    }
    Reader r(wire);
    DnsMessage msg;
    DnsHeader& h = msg.header;
    h.id = r.u16();
    std::uint16_t flags = r.u16();
    h.qr = flags & 0x8000;
    h.opcode = static_cast<std::uint8_t>((flags >> 11) & 0xF);
    h.aa = flags & 0x0400;
    h.tc = flags & 0x0200;
    h.rd = flags & 0x0100;
    h.ra = flags & 0x0080;
    h.rcode = static_cast<std::uint8_t>(flags & 0xF);
    h.qdcount = r.u16();
    h.ancount = r.u16();
    h.nscount = r.u16();
    h.arcount = r.u16();
    for (int i = 0; i < h.qdcount; ++i) msg.questions.push_back(decode_question(r));
    for (int i = 0; i < h.ancount; ++i) msg.answers.push_back(decode_rr(r));
    for (int i = 0; i < h.nscount; ++i) msg.authorities.push_back(decode_rr(r));
    for (int i = 0; i < h.arcount; ++i) msg.additionals.push_back(decode_rr(r));
    return msg;
}

std::vector<std::uint8_t> encode_message(const DnsMessage& msg) {
    Writer w;
    const DnsHeader& h = msg.header;
    w.u16(h.id);
    std::uint16_t flags = 0;
    if (h.qr) flags |= 0x8000;
    flags |= static_cast<std::uint16_t>((h.opcode & 0xF) << 11);
    if (h.aa) flags |= 0x0400;
    if (h.tc) flags |= 0x0200;
    if (h.rd) flags |= 0x0100;
    if (h.ra) flags |= 0x0080;
    flags |= h.rcode & 0xF;
    w.u16(flags);
    w.u16(static_cast<std::uint16_t>(msg.questions.size()));
    w.u16(static_cast<std::uint16_t>(msg.answers.size()));
    w.u16(static_cast<std::uint16_t>(msg.authorities.size()));
    w.u16(static_cast<std::uint16_t>(msg.additionals.size()));
    for (const auto& q : msg.questions) {
        w.name(q.qname);
        w.u16(q.qtype);
        w.u16(q.qclass);
    }
    for (const auto& rr : msg.answers) encode_rr(w, rr);
    for (const auto& rr : msg.authorities) encode_rr(w, rr);
    for (const auto& rr : msg.additionals) encode_rr(w, rr);
    return w.take();
}

DnsMessage synthesize_nxdomain(const DnsMessage& query, std::uint32_t ttl_hint) {
    if (query.header.qr) throw NotAQuery("input is a response, not a query");
    if (query.questions.empty()) throw NotAQuery("query carries no question");
    DnsMessage resp;
    resp.header.id = query.header.id;
    resp.header.qr = true;
    resp.header.opcode = query.header.opcode;
    resp.header.rd = query.header.rd;
    resp.header.ra = true;
    resp.header.rcode = kRcodeNxDomain;
    resp.questions = query.questions;
    resp.header.qdcount = static_cast<std::uint16_t>(resp.questions.size());

    ResourceRecord soa_rr;
    soa_rr.name = query.questions.front().qname;
    soa_rr.rtype = kTypeSoa;
    soa_rr.rclass = kClassIn;
    soa_rr.ttl = ttl_hint;
    SoaRdata soa;
    soa.mname = DnsName::from_string("invalid");
    soa.rname = DnsName::from_string("nobody.invalid");
    soa.minimum = ttl_hint;
    soa_rr.rdata = std::move(soa);
    resp.authorities.push_back(std::move(soa_rr));
    resp.header.nscount = 1;
    return resp;
}

std::optional<SoaRdata> extract_soa(const DnsMessage& msg) {
    for (const auto* section : {&msg.answers, &msg.authorities}) {
        for (const auto& rr : *section) {
            if (const auto* soa = std::get_if<SoaRdata>(&rr.rdata)) return *soa;
        }
    }
    return std::nullopt;
}

}  // namespace chronogate::wire
