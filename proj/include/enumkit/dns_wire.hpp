#pragma once

// Minimal DNS codec and UDP stub transport for NAPTR lookups.
//
// The encoder never compresses names; the decoder follows compression
// pointers in owner names and questions. NAPTR replacement fields must be
// uncompressed. TC responses are reported as TruncatedMessage (no TCP).

#include "enumkit/naptr.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace enumkit::dns {

inline constexpr std::uint16_t kTypeNaptr = 35;
inline constexpr std::uint16_t kClassIn = 1;
inline constexpr std::size_t kMaxSendSize = 512;
inline constexpr std::size_t kMaxReceiveSize = 4096;

inline constexpr std::uint8_t kRcodeNoError = 0;
inline constexpr std::uint8_t kRcodeFormErr = 1;
inline constexpr std::uint8_t kRcodeServFail = 2;
inline constexpr std::uint8_t kRcodeNxDomain = 3;

using Bytes = std::vector<std::uint8_t>;

struct Header {
    std::uint16_t id = 0;
    bool qr = false;
    std::uint8_t opcode = 0;
    bool aa = false;
    bool tc = false;
    bool rd = false;
    bool ra = false;
    std::uint8_t rcode = 0;
    bool operator==(const Header&) const = default;
};

struct Question {
    std::string qname; // presentation form, no trailing dot
    std::uint16_t qtype = kTypeNaptr;
    std::uint16_t qclass = kClassIn;
    bool operator==(const Question&) const = default;
};

struct ResourceRecord {
    std::string name;
    std::uint16_t type = 0;
    std::uint16_t klass = kClassIn;
    std::uint32_t ttl = 0;
    Bytes rdata;
    bool operator==(const ResourceRecord&) const = default;
};

struct DnsMessage {
    Header header;
    std::optional<Question> question;
    std::vector<ResourceRecord> answers;
    std::vector<ResourceRecord> authority;
    std::vector<ResourceRecord> additional;
    bool operator==(const DnsMessage&) const = default;
};

/// Binary NAPTR RDATA fields.
struct WireNaptr {
    std::uint16_t order = 0;
    std::uint16_t preference = 0;
    std::string flags;
    std::string service;
    std::string regexp;
    std::string replacement; // presentation form; empty for the root name

    static WireNaptr from_record(const NaptrRecord& r);
    /// Validates the fields as a NaptrRecord; MalformedRdata otherwise.
    NaptrRecord to_record() const;

    Bytes encode() const;
    static WireNaptr decode(std::span<const std::uint8_t> rdata);

    bool operator==(const WireNaptr&) const = default;
};

/// Appends an uncompressed wire name. Handles "\." and "\DDD" escapes.
void encode_name(std::string_view name, Bytes& out);

/// Standard query with RD set, one IN/NAPTR question.
Bytes encode_query(std::string_view domain, std::uint16_t id);

/// Serializes without compression; MessageTooLarge beyond `max_size`.
Bytes encode_message(const DnsMessage& msg, std::size_t max_size = kMaxSendSize);

/// Parses any message (query or response) without TC/RCODE interpretation.
DnsMessage decode_message(std::span<const std::uint8_t> bytes);

/// decode_message plus response checks: size cap, QR set, TC rejected.
DnsMessage decode_response(std::span<const std::uint8_t> bytes);

/// NAPTR answers as records; NxDomain when RCODE is 3.
std::vector<NaptrRecord> naptr_answers(const DnsMessage& response);

/// Builds a response for `query`. `lookup` returns the record set owned by a
/// query name, or nullopt for NXDOMAIN.
using ZoneLookup = std::function<std::optional<RecordSet>(const std::string& qname)>;
Bytes answer_query(std::span<const std::uint8_t> query, const ZoneLookup& lookup);

// Transport

struct Endpoint {
    std::string host;
    std::uint16_t port = 53;

    /// "host:port"
    static Endpoint parse(std::string_view text);
    std::string to_string() const { return host + ":" + std::to_string(port); }
    bool operator==(const Endpoint&) const = default;
};

class DatagramTransport {
public:
    virtual ~DatagramTransport() = default;
    virtual void send(std::span<const std::uint8_t> datagram) = 0;
    /// Waits up to `wait` for one datagram; nullopt on timeout.
    virtual std::optional<Bytes> receive(std::chrono::milliseconds wait) = 0;
};

class UdpTransport final : public DatagramTransport {
public:
    explicit UdpTransport(const Endpoint& endpoint);
    ~UdpTransport() override;
    UdpTransport(const UdpTransport&) = delete;
    UdpTransport& operator=(const UdpTransport&) = delete;

    void send(std::span<const std::uint8_t> datagram) override;
    std::optional<Bytes> receive(std::chrono::milliseconds wait) override;

private:
    int fd_ = -1;
};

/// Sends at most retries+1 times, waiting `timeout` after each send.
/// Datagrams whose id differs from the query's are discarded.
Bytes udp_exchange(DatagramTransport& transport, std::span<const std::uint8_t> query,
                   std::chrono::milliseconds timeout, unsigned retries);
Bytes udp_exchange(const Endpoint& endpoint, std::span<const std::uint8_t> query,
                   std::chrono::milliseconds timeout, unsigned retries);

/// Loopback UDP responder on 127.0.0.1. The handler returns the datagrams to
/// send back for each request (possibly none).
class UdpResponder {
public:
    using Handler = std::function<std::vector<Bytes>(std::span<const std::uint8_t>)>;

    explicit UdpResponder(Handler handler, std::uint16_t port = 0);
    ~UdpResponder();
    UdpResponder(const UdpResponder&) = delete;
    UdpResponder& operator=(const UdpResponder&) = delete;

    Endpoint endpoint() const { return {"127.0.0.1", port_}; }
    std::size_t requests() const { return requests_.load(); }

    /// Handler that answers every query from a fixed list of record sets.
    static Handler serving(std::vector<RecordSet> sets);

private:
    void loop();

    Handler handler_;
    int fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    std::atomic<std::size_t> requests_{0};
    std::thread thread_;
};

} // namespace enumkit::dns
