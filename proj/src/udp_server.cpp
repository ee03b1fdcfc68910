#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <fstream>
#include <set>
#include <stdexcept>
#include <system_error>

#include "chronogate/resolver_proxy.hpp"

namespace chronogate::proxy {

namespace {

struct Endpoint {
    sockaddr_in addr{};
};

Endpoint parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) {
        throw std::runtime_error("endpoint must be <ipv4>:<port>: " + text);
    }
    const std::string host = text.substr(0, colon);
    const int port = std::stoi(text.substr(colon + 1));
    if (port < 1 || port > 65535) throw std::runtime_error("bad port in endpoint: " + text);
    Endpoint ep;
    ep.addr.sin_family = AF_INET;
    ep.addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (inet_pton(AF_INET, host.c_str(), &ep.addr.sin_addr) != 1) {
        throw std::runtime_error("bad IPv4 address in endpoint: " + text);
    }
    return ep;
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    int get() const { return fd_; }

private:
    int fd_;
};

class UdpUpstream : public UpstreamTransport {
public:
    UdpUpstream(const Endpoint& ep, std::int64_t timeout_ms)
        : ep_(ep), timeout_ms_(timeout_ms) {}

    std::optional<Bytes> exchange(const Bytes& query) override {
        Fd sock(::socket(AF_INET, SOCK_DGRAM, 0));
        if (sock.get() < 0) return std::nullopt;
        if (::sendto(sock.get(), query.data(), query.size(), 0,
                     reinterpret_cast<const sockaddr*>(&ep_.addr), sizeof(ep_.addr)) < 0) {
            return std::nullopt;
        }
        pollfd pfd{sock.get(), POLLIN, 0};
        if (::poll(&pfd, 1, static_cast<int>(timeout_ms_)) <= 0) return std::nullopt;
        Bytes buf(4096);
        ssize_t n = ::recv(sock.get(), buf.data(), buf.size(), 0);
        if (n < 0) return std::nullopt;
        buf.resize(static_cast<std::size_t>(n));
        return buf;
    }

private:
    Endpoint ep_;
    std::int64_t timeout_ms_;
};

std::shared_ptr<const age::AgeIndex> load_feed(const std::string& path, UnixTime now,
                                               bool allow_empty) {
    auto index = std::make_shared<age::AgeIndex>();
    std::ifstream in(path);
    if (!in) {
        if (allow_empty) return index;
        throw std::runtime_error("cannot open feed file: " + path);
    }
    try {
        age::ingest_feed_csv(in, now, *index);
    } catch (const age::EmptyFeed&) {
        if (!allow_empty) throw;
    }
    return index;
}

}  // namespace

void run(const ServeOptions& options, const std::atomic<bool>* stop_flag) {
    const config::ProxySettings& settings = options.settings;
    if (settings.upstream.empty()) throw std::runtime_error("no upstream endpoint configured");

    SystemTimeSource clock;
    const Endpoint listen_ep = parse_endpoint(settings.listen);
    const Endpoint upstream_ep = parse_endpoint(settings.upstream);
    UdpUpstream upstream(upstream_ep, settings.upstream_timeout_ms);

    ProxyState state;
    state.policy = settings.policy;
    state.upstream = &upstream;
    state.soa_probe_enabled = settings.soa_probe_enabled;
    state.id_rng.seed(std::random_device{}());
    state.index = load_feed(settings.feed_path, clock.now(), options.allow_empty_feed);

    std::ofstream log;
    if (!settings.log_path.empty()) {
        log.open(settings.log_path, std::ios::app);
        if (!log) throw std::runtime_error("cannot open log file: " + settings.log_path);
    }
    std::ofstream blocklist;
    std::set<std::string> blocked_seen;
    if (!settings.blocklist_path.empty()) {
        blocklist.open(settings.blocklist_path, std::ios::app);
        if (!blocklist) {
            throw std::runtime_error("cannot open blocklist file: " + settings.blocklist_path);
        }
    }

    Fd sock(::socket(AF_INET, SOCK_DGRAM, 0));
    if (sock.get() < 0) throw std::system_error(errno, std::generic_category(), "socket");
    int one = 1;
    ::setsockopt(sock.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(sock.get(), reinterpret_cast<const sockaddr*>(&listen_ep.addr),
               sizeof(listen_ep.addr)) < 0) {
        throw std::system_error(errno, std::generic_category(),
                                "bind " + settings.listen);
    }

    std::deque<std::string> probe_queue;
    UnixTime last_reload = clock.now();
    const std::int64_t reload_period = settings.feed_reload_minutes * 60;

    Bytes buf(65536);
    while (!stop_flag || !stop_flag->load()) {
        pollfd pfd{sock.get(), POLLIN, 0};
        int ready = ::poll(&pfd, 1, 250);

        const UnixTime now = clock.now();
        if (reload_period > 0 && now - last_reload >= reload_period) {
            // Atomic swap; in-flight readers keep the old index.
            try {
                state.index = load_feed(settings.feed_path, now, options.allow_empty_feed);
            } catch (const std::exception&) {
                // Keep serving from the previous index when the feed breaks.
            }
            last_reload = now;
        }

        if (ready <= 0) {
            // Idle: run one queued SOA probe off the query path.
            if (!probe_queue.empty()) {
                std::string domain = std::move(probe_queue.front());
                probe_queue.pop_front();
                run_soa_probe(domain, now, state);
            }
            continue;
        }

        sockaddr_in peer{};
        socklen_t peer_len = sizeof(peer);
        ssize_t n = ::recvfrom(sock.get(), buf.data(), buf.size(), 0,
                               reinterpret_cast<sockaddr*>(&peer), &peer_len);
        if (n < 0) continue;

        char peer_str[INET_ADDRSTRLEN] = {0};
        inet_ntop(AF_INET, &peer.sin_addr, peer_str, sizeof(peer_str));
        const std::string client =
            std::string(peer_str) + ":" + std::to_string(ntohs(peer.sin_port));

        QueryOutcome outcome = handle_query(
            std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)), client,
            now, state);

        if (outcome.response) {
            ::sendto(sock.get(), outcome.response->data(), outcome.response->size(), 0,
                     reinterpret_cast<const sockaddr*>(&peer), peer_len);
        }
        for (const auto& event : outcome.events) {
            if (log.is_open()) log << to_jsonl(event) << '\n';
            if (event.action == policy::Action::Block && blocklist.is_open() &&
                blocked_seen.insert(event.qname).second) {
                blocklist << event.qname << '\n';
                blocklist.flush();
            }
        }
        if (log.is_open()) log.flush();
        for (auto& candidate : outcome.probe_candidates) {
            probe_queue.push_back(std::move(candidate));
        }
    }
}

}  // namespace chronogate::proxy
