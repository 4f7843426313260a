#include "enumkit/dns_wire.hpp"

#include "enumkit/error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <memory>
#include <map>
#include <set>

namespace enumkit::dns {

namespace {

constexpr std::size_t kMaxLabel = 63;
constexpr std::size_t kMaxName = 255;

void put16(Bytes& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put32(Bytes& out, std::uint32_t v)
{
    put16(out, static_cast<std::uint16_t>(v >> 16));
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
}

void put_character_string(Bytes& out, std::string_view s)
{
    if (s.size() > 255) {
        fail(Errc::MalformedRdata, "character-string longer than 255 bytes");
    }
    out.push_back(static_cast<std::uint8_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void append_label_text(std::string& out, std::span<const std::uint8_t> label)
{
    for (auto c : label) {
        if (c == '.' || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c <= 0x20 || c >= 0x7f) {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\%03u", static_cast<unsigned>(c));
            out += buf;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
}

/// Splits presentation text into raw labels.
std::vector<std::string> split_name(std::string_view name)
{
    std::vector<std::string> labels;
    if (name.empty() || name == ".") {
        return labels;
    }
    std::string current;
    bool pending = false;
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '\\') {
            if (i + 3 < name.size() && std::isdigit(static_cast<unsigned char>(name[i + 1])) &&
                std::isdigit(static_cast<unsigned char>(name[i + 2])) &&
                std::isdigit(static_cast<unsigned char>(name[i + 3]))) {
                int v = (name[i + 1] - '0') * 100 + (name[i + 2] - '0') * 10 + (name[i + 3] - '0');
                if (v > 255) {
                    fail(Errc::NameTooLong, "bad \\DDD escape in name");
                }
                current.push_back(static_cast<char>(v));
                i += 3;
            } else if (i + 1 < name.size()) {
                current.push_back(name[++i]);
            } else {
                fail(Errc::NameTooLong, "dangling escape in name");
            }
            pending = true;
            continue;
        }
        if (c == '.') {
            if (current.empty()) {
                fail(Errc::NameTooLong, "empty label in '" + std::string(name) + "'");
            }
            labels.push_back(std::move(current));
            current.clear();
            pending = false;
            continue;
        }
        current.push_back(c);
        pending = true;
    }
    if (pending) {
        labels.push_back(std::move(current));
    }
    return labels;
}

class Reader {
public:
    Reader(std::span<const std::uint8_t> data, Errc overrun = Errc::TruncatedMessage)
        : d_(data), overrun_(overrun)
    {
    }

    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return d_.size() - pos_; }

    void need(std::size_t n) const
    {
        if (n > remaining()) {
            fail(overrun_, "message ends at byte " + std::to_string(d_.size()) + ", needed " +
                               std::to_string(pos_ + n));
        }
    }

    std::uint8_t u8()
    {
        need(1);
        return d_[pos_++];
    }

    std::uint16_t u16()
    {
        need(2);
        auto v = static_cast<std::uint16_t>((d_[pos_] << 8) | d_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32()
    {
        auto hi = u16();
        return (static_cast<std::uint32_t>(hi) << 16) | u16();
    }

    std::span<const std::uint8_t> take(std::size_t n)
    {
        need(n);
        auto s = d_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::string character_string()
    {
        auto len = u8();
        auto s = take(len);
        return std::string(s.begin(), s.end());
    }

    /// Reads a name, following pointers when `allow_pointers`.
    std::string name(bool allow_pointers, Errc pointer_error = Errc::MalformedRdata)
    {
        std::string out;
        std::size_t p = pos_;
        bool jumped = false;
        std::set<std::size_t> visited;
        std::size_t wire_len = 1;
        while (true) {
            if (p >= d_.size()) {
                fail(overrun_, "name runs past end of message");
            }
            std::uint8_t len = d_[p];
            if ((len & 0xC0) == 0xC0) {
                if (!allow_pointers) {
                    fail(pointer_error, "compressed name where none is allowed");
                }
                if (p + 1 >= d_.size()) {
                    fail(overrun_, "compression pointer runs past end of message");
                }
                std::size_t target = (static_cast<std::size_t>(len & 0x3F) << 8) | d_[p + 1];
                if (!jumped) {
                    pos_ = p + 2;
                }
                jumped = true;
                if (!visited.insert(target).second) {
                    fail(Errc::CompressionLoop, "compression pointer cycle at offset " + std::to_string(target));
                }
                if (target >= d_.size()) {
                    fail(Errc::MalformedMessage, "compression pointer beyond message");
                }
                p = target;
                continue;
            }
            if (len & 0xC0) {
                fail(Errc::MalformedMessage, "reserved label type");
            }
            if (len == 0) {
                if (!jumped) {
                    pos_ = p + 1;
                }
                return out;
            }
            if (p + 1 + len > d_.size()) {
                fail(overrun_, "label runs past end of message");
            }
            wire_len += len + 1u;
            if (wire_len > kMaxName) {
                fail(Errc::MalformedMessage, "name longer than 255 bytes");
            }
            if (!out.empty()) {
                out.push_back('.');
            }
            append_label_text(out, d_.subspan(p + 1, len));
            p += 1 + len;
        }
    }

private:
    std::span<const std::uint8_t> d_;
    Errc overrun_;
    std::size_t pos_ = 0;
};

void encode_header(const Header& h, std::uint16_t qd, std::uint16_t an, std::uint16_t ns, std::uint16_t ar,
                   Bytes& out)
{
    put16(out, h.id);
    std::uint16_t flags = 0;
    flags |= h.qr ? 0x8000 : 0;
    flags |= static_cast<std::uint16_t>((h.opcode & 0x0F) << 11);
    flags |= h.aa ? 0x0400 : 0;
    flags |= h.tc ? 0x0200 : 0;
    flags |= h.rd ? 0x0100 : 0;
    flags |= h.ra ? 0x0080 : 0;
    flags |= static_cast<std::uint16_t>(h.rcode & 0x0F);
    put16(out, flags);
    put16(out, qd);
    put16(out, an);
    put16(out, ns);
    put16(out, ar);
}

void encode_rr(const ResourceRecord& rr, Bytes& out)
{
    encode_name(rr.name, out);
    put16(out, rr.type);
    put16(out, rr.klass);
    put32(out, rr.ttl);
    if (rr.rdata.size() > 0xFFFF) {
        fail(Errc::MessageTooLarge, "rdata exceeds 65535 bytes");
    }
    put16(out, static_cast<std::uint16_t>(rr.rdata.size()));
    out.insert(out.end(), rr.rdata.begin(), rr.rdata.end());
}

ResourceRecord decode_rr(Reader& r)
{
    ResourceRecord rr;
    rr.name = r.name(true);
    rr.type = r.u16();
    rr.klass = r.u16();
    rr.ttl = r.u32();
    auto len = r.u16();
    auto data = r.take(len);
    rr.rdata.assign(data.begin(), data.end());
    if (rr.type == kTypeNaptr) {
        WireNaptr::decode(rr.rdata);
    }
    return rr;
}

} // namespace

void encode_name(std::string_view name, Bytes& out)
{
    auto labels = split_name(name);
    std::size_t wire = 1;
    for (const auto& l : labels) {
        if (l.size() > kMaxLabel) {
            fail(Errc::NameTooLong, "label longer than 63 bytes in '" + std::string(name) + "'");
        }
        wire += l.size() + 1;
    }
    if (wire > kMaxName) {
        fail(Errc::NameTooLong, "name longer than 255 bytes: '" + std::string(name) + "'");
    }
    for (const auto& l : labels) {
        out.push_back(static_cast<std::uint8_t>(l.size()));
        out.insert(out.end(), l.begin(), l.end());
    }
    out.push_back(0);
}

WireNaptr WireNaptr::from_record(const NaptrRecord& r)
{
    return WireNaptr{r.order, r.preference, r.flags, r.service, r.rewrite.to_string(), r.replacement};
}

NaptrRecord WireNaptr::to_record() const
{
    try {
        NaptrRecord r;
        r.order = order;
        r.preference = preference;
        r.flags = lowercase(flags);
        if (!r.flags.empty() && r.flags != "u") {
            fail(Errc::UnsupportedFlag, "unsupported flag '" + flags + "'");
        }
        parse_service_field(service);
        r.service = service;
        r.rewrite = RewriteRule::parse(regexp);
        r.replacement = replacement;
        return r;
    } catch (const Error& e) {
        fail(Errc::MalformedRdata, std::string("NAPTR rdata: ") + e.what());
    }
}

Bytes WireNaptr::encode() const
{
    Bytes out;
    put16(out, order);
    put16(out, preference);
    put_character_string(out, flags);
    put_character_string(out, service);
    put_character_string(out, regexp);
    encode_name(replacement, out);
    return out;
}

WireNaptr WireNaptr::decode(std::span<const std::uint8_t> rdata)
{
    Reader r(rdata, Errc::MalformedRdata);
    WireNaptr w;
    w.order = r.u16();
    w.preference = r.u16();
    w.flags = r.character_string();
    w.service = r.character_string();
    w.regexp = r.character_string();
    try {
        w.replacement = r.name(false);
    } catch (const Error& e) {
        fail(Errc::MalformedRdata, std::string("NAPTR replacement: ") + e.what());
    }
    if (r.remaining() != 0) {
        fail(Errc::MalformedRdata, "trailing bytes after NAPTR replacement");
    }
    return w;
}

Bytes encode_query(std::string_view domain, std::uint16_t id)
{
    if (domain.empty() || domain == ".") {
        fail(Errc::NameTooLong, "empty query name");
    }
    DnsMessage m;
    m.header.id = id;
    m.header.rd = true;
    m.question = Question{std::string(domain), kTypeNaptr, kClassIn};
    return encode_message(m);
}

Bytes encode_message(const DnsMessage& msg, std::size_t max_size)
{
    Bytes out;
    out.reserve(512);
    auto count = [](std::size_t n) {
        if (n > 0xFFFF) {
            fail(Errc::MessageTooLarge, "section has more than 65535 records");
        }
        return static_cast<std::uint16_t>(n);
    };
    encode_header(msg.header, msg.question ? 1 : 0, count(msg.answers.size()), count(msg.authority.size()),
                  count(msg.additional.size()), out);
    if (msg.question) {
        encode_name(msg.question->qname, out);
        put16(out, msg.question->qtype);
        put16(out, msg.question->qclass);
    }
    for (const auto* section : {&msg.answers, &msg.authority, &msg.additional}) {
        for (const auto& rr : *section) {
            encode_rr(rr, out);
        }
    }
    if (out.size() > max_size) {
        fail(Errc::MessageTooLarge,
             "message of " + std::to_string(out.size()) + " bytes exceeds " + std::to_string(max_size));
    }
    return out;
}

DnsMessage decode_message(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 12) {
        fail(Errc::TruncatedMessage, "message shorter than the 12-byte header");
    }
    Reader r(bytes);
    DnsMessage m;
    m.header.id = r.u16();
    auto flags = r.u16();
    m.header.qr = flags & 0x8000;
    m.header.opcode = static_cast<std::uint8_t>((flags >> 11) & 0x0F);
    m.header.aa = flags & 0x0400;
    m.header.tc = flags & 0x0200;
    m.header.rd = flags & 0x0100;
    m.header.ra = flags & 0x0080;
    m.header.rcode = static_cast<std::uint8_t>(flags & 0x0F);
    if (flags & 0x0070) {
        fail(Errc::MalformedMessage, "reserved header bits set");
    }
    auto qd = r.u16();
    auto an = r.u16();
    auto ns = r.u16();
    auto ar = r.u16();
    if (qd > 1) {
        fail(Errc::MalformedMessage, "more than one question");
    }
    if (qd == 1) {
        Question q;
        q.qname = r.name(true);
        q.qtype = r.u16();
        q.qclass = r.u16();
        m.question = std::move(q);
    }
    // Every record needs at least 11 bytes; reject impossible counts early.
    if (static_cast<std::size_t>(an + ns + ar) * 11 > r.remaining()) {
        fail(Errc::TruncatedMessage, "record counts exceed message size");
    }
    for (std::uint16_t i = 0; i < an; ++i) m.answers.push_back(decode_rr(r));
    for (std::uint16_t i = 0; i < ns; ++i) m.authority.push_back(decode_rr(r));
    for (std::uint16_t i = 0; i < ar; ++i) m.additional.push_back(decode_rr(r));
    if (r.remaining() != 0) {
        fail(Errc::MalformedMessage, "trailing bytes after last record");
    }
    return m;
}

DnsMessage decode_response(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() > kMaxReceiveSize) {
        fail(Errc::MessageTooLarge, "response exceeds 4096 bytes");
    }
    auto m = decode_message(bytes);
    if (!m.header.qr) {
        fail(Errc::MalformedMessage, "datagram is not a response");
    }
    if (m.header.tc) {
        fail(Errc::TruncatedMessage, "response truncated (TC set); TCP fallback is not supported");
    }
    return m;
}

std::vector<NaptrRecord> naptr_answers(const DnsMessage& response)
{
    if (response.header.rcode == kRcodeNxDomain) {
        fail(Errc::NxDomain, "NXDOMAIN" + (response.question ? " for " + response.question->qname : std::string()));
    }
    if (response.header.rcode != kRcodeNoError) {
        fail(Errc::TransportError, "server answered RCODE " + std::to_string(response.header.rcode));
    }
    std::vector<NaptrRecord> out;
    for (const auto& rr : response.answers) {
        if (rr.type == kTypeNaptr && rr.klass == kClassIn) {
            out.push_back(WireNaptr::decode(rr.rdata).to_record());
        }
    }
    return out;
}

Bytes answer_query(std::span<const std::uint8_t> query, const ZoneLookup& lookup)
{
    DnsMessage q;
    try {
        q = decode_message(query);
    } catch (const Error&) {
        if (query.size() < 2) {
            return {};
        }
        DnsMessage err;
        err.header.id = static_cast<std::uint16_t>((query[0] << 8) | query[1]);
        err.header.qr = true;
        err.header.rcode = kRcodeFormErr;
        return encode_message(err);
    }

    DnsMessage resp;
    resp.header.id = q.header.id;
    resp.header.qr = true;
    resp.header.opcode = q.header.opcode;
    resp.header.rd = q.header.rd;
    resp.question = q.question;
    if (q.header.qr || !q.question || q.header.opcode != 0) {
        resp.header.rcode = kRcodeFormErr;
        return encode_message(resp);
    }
    resp.header.aa = true;

    const auto& question = *q.question;
    auto rs = lookup(question.qname);
    if (!rs) {
        resp.header.rcode = kRcodeNxDomain;
        return encode_message(resp);
    }
    if (question.qclass == kClassIn && (question.qtype == kTypeNaptr || question.qtype == 255)) {
        for (const auto& rec : rs->records) {
            resp.answers.push_back(
                ResourceRecord{question.qname, kTypeNaptr, kClassIn, rs->ttl_seconds, WireNaptr::from_record(rec).encode()});
        }
    }
    try {
        return encode_message(resp);
    } catch (const Error& e) {
        if (e.code() != Errc::MessageTooLarge) {
            throw;
        }
        resp.answers.clear();
        resp.header.tc = true;
        return encode_message(resp);
    }
}

Endpoint Endpoint::parse(std::string_view text)
{
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
        fail(Errc::ConfigError, "endpoint '" + std::string(text) + "' must be host:port");
    }
    auto port_text = text.substr(colon + 1);
    unsigned port = 0;
    auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
    if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535) {
        fail(Errc::ConfigError, "bad port in endpoint '" + std::string(text) + "'");
    }
    auto host = text.substr(0, colon);
    if (host.size() >= 2 && host.front() == '[' && host.back() == ']') {
        host = host.substr(1, host.size() - 2);
    }
    return Endpoint{std::string(host), static_cast<std::uint16_t>(port)};
}

UdpTransport::UdpTransport(const Endpoint& endpoint)
{
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_DGRAM;
    addrinfo* res = nullptr;
    auto port = std::to_string(endpoint.port);
    if (int rc = getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        fail(Errc::TransportError, "cannot resolve " + endpoint.host + ": " + gai_strerror(rc));
    }
    for (auto* ai = res; ai; ai = ai->ai_next) {
        fd_ = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd_ < 0) {
            continue;
        }
        if (::connect(fd_, ai->ai_addr, ai->ai_addrlen) == 0) {
            break;
        }
        ::close(fd_);
        fd_ = -1;
    }
    freeaddrinfo(res);
    if (fd_ < 0) {
        fail(Errc::TransportError, "cannot open UDP socket to " + endpoint.to_string());
    }
}

UdpTransport::~UdpTransport()
{
    if (fd_ >= 0) {
        ::close(fd_);
    }
}

void UdpTransport::send(std::span<const std::uint8_t> datagram)
{
    // Connected UDP reports ICMP errors from earlier sends here; those are
    // indistinguishable from loss for a stub resolver.
    if (::send(fd_, datagram.data(), datagram.size(), 0) < 0 && errno != ECONNREFUSED) {
        fail(Errc::TransportError, std::string("send: ") + std::strerror(errno));
    }
}

std::optional<Bytes> UdpTransport::receive(std::chrono::milliseconds wait)
{
    auto deadline = std::chrono::steady_clock::now() + wait;
    while (true) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            return std::nullopt;
        }
        pollfd pfd{fd_, POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0 && errno == EINTR) {
            continue;
        }
        if (rc <= 0) {
            return std::nullopt;
        }
        Bytes buf(kMaxReceiveSize + 1);
        auto n = ::recv(fd_, buf.data(), buf.size(), 0);
        if (n < 0) {
            if (errno == ECONNREFUSED || errno == EINTR) {
                continue;
            }
            fail(Errc::TransportError, std::string("recv: ") + std::strerror(errno));
        }
        buf.resize(static_cast<std::size_t>(n));
        return buf;
    }
}

Bytes udp_exchange(DatagramTransport& transport, std::span<const std::uint8_t> query,
                   std::chrono::milliseconds timeout, unsigned retries)
{
    if (query.size() < 12) {
        fail(Errc::MalformedMessage, "query shorter than a DNS header");
    }
    if (query.size() > kMaxSendSize) {
        fail(Errc::MessageTooLarge, "query exceeds 512 bytes");
    }
    std::size_t mismatched = 0;
    for (unsigned attempt = 0; attempt <= retries; ++attempt) {
        transport.send(query);
        auto deadline = std::chrono::steady_clock::now() + timeout;
        while (true) {
            auto left = deadline - std::chrono::steady_clock::now();
            if (left <= std::chrono::steady_clock::duration::zero()) {
                break;
            }
            auto datagram = transport.receive(std::chrono::ceil<std::chrono::milliseconds>(left));
            if (!datagram) {
                break;
            }
            if (datagram->size() >= 2 && (*datagram)[0] == query[0] && (*datagram)[1] == query[1]) {
                return std::move(*datagram);
            }
            ++mismatched;
        }
    }
    if (mismatched > 0) {
        fail(Errc::IdMismatchExhausted,
             std::to_string(mismatched) + " datagram(s) with the wrong id; no matching response");
    }
    fail(Errc::Timeout, "no response after " + std::to_string(retries + 1) + " attempt(s)");
}

Bytes udp_exchange(const Endpoint& endpoint, std::span<const std::uint8_t> query, std::chrono::milliseconds timeout,
                   unsigned retries)
{
    UdpTransport transport(endpoint);
    return udp_exchange(transport, query, timeout, retries);
}

UdpResponder::UdpResponder(Handler handler, std::uint16_t port) : handler_(std::move(handler))
{
    fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
    if (fd_ < 0) {
        fail(Errc::TransportError, std::string("socket: ") + std::strerror(errno));
    }
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
        ::close(fd_);
        fail(Errc::TransportError, std::string("bind: ") + std::strerror(errno));
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { loop(); });
}

UdpResponder::~UdpResponder()
{
    stop_ = true;
    if (thread_.joinable()) {
        thread_.join();
    }
    ::close(fd_);
}

void UdpResponder::loop()
{
    Bytes buf(kMaxReceiveSize);
    while (!stop_) {
        pollfd pfd{fd_, POLLIN, 0};
        if (::poll(&pfd, 1, 20) <= 0) {
            continue;
        }
        sockaddr_storage peer{};
        socklen_t peer_len = sizeof peer;
        auto n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&peer), &peer_len);
        if (n < 0) {
            continue;
        }
        ++requests_;
        std::vector<Bytes> replies;
        try {
            replies = handler_(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
        } catch (const std::exception&) {
            continue;
        }
        for (const auto& reply : replies) {
            ::sendto(fd_, reply.data(), reply.size(), 0, reinterpret_cast<sockaddr*>(&peer), peer_len);
        }
    }
}

UdpResponder::Handler UdpResponder::serving(std::vector<RecordSet> sets)
{
    auto zone = std::make_shared<std::map<std::string, RecordSet>>();
    for (auto& rs : sets) {
        auto key = rs.owner.to_string();
        zone->insert_or_assign(key, std::move(rs));
    }
    return [zone](std::span<const std::uint8_t> query) {
        auto reply = answer_query(query, [&](const std::string& qname) -> std::optional<RecordSet> {
            auto key = lowercase(qname);
            while (!key.empty() && key.back() == '.') {
                key.pop_back();
            }
            auto it = zone->find(key);
            if (it == zone->end()) {
                return std::nullopt;
            }
            return it->second;
        });
        return reply.empty() ? std::vector<Bytes>{} : std::vector<Bytes>{reply};
    };
}

} // namespace enumkit::dns
