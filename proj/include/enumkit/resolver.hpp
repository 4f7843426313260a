#pragma once

// Resolution flows over one or more ENUM roots: tiered walk of a single
// tree, extension-tagged routing, metasearch, bookmarks, and a TTL cache.

#include "enumkit/dns_wire.hpp"
#include "enumkit/e164.hpp"
#include "enumkit/naptr.hpp"
#include "enumkit/registry.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace enumkit {

using RootId = std::uint32_t;

struct RemoteRoot {
    dns::Endpoint endpoint;
    std::chrono::milliseconds timeout{1000};
    unsigned retries = 2;
};

struct RootEntry {
    std::string apex;
    std::variant<std::shared_ptr<TreeStore>, RemoteRoot> source;
};

struct RootConfig {
    std::map<RootId, RootEntry> roots;
    RootId default_root = 0;
    std::vector<std::string> access_codes{"911", "411", "711"};
    std::optional<DialingContext> dialing_context;

    /// Throws ConfigError when the default root is missing.
    void validate() const;
};

/// One line of the root-registry file: `<root-id>\t<apex>\t<local|host:port>`.
struct RootLine {
    RootId id = 0;
    std::string apex;
    std::optional<dns::Endpoint> remote; // nullopt for "local"
    bool operator==(const RootLine&) const = default;
};

std::vector<RootLine> parse_root_registry(std::string_view text);
std::string format_root_registry(const std::vector<RootLine>& lines);

struct ResolutionResult {
    E164Number number;
    RootId root_id = 0;
    std::vector<ContactUri> contacts;
    bool from_cache = false;
    std::vector<std::string> queried_zones;
    std::vector<RootId> roots_consulted;
};

struct Bypass {
    std::string access_code;
};

using DialOutcome = std::variant<ResolutionResult, Bypass>;

struct CacheKey {
    RootId root = 0;
    EnumDomain owner;
    auto operator<=>(const CacheKey&) const = default;
};

struct CacheEntry {
    CacheKey key;
    RecordSet value;
    Timestamp expires_at = 0;
};

/// Record-set cache. Entries are served strictly before expires_at and are
/// replaced whole, so concurrent readers never see a partial entry.
class RecordCache {
public:
    std::optional<RecordSet> get(const CacheKey& key, Timestamp now) const;
    /// ttl 0 is never stored.
    void put(const CacheKey& key, const RecordSet& rs, Timestamp now);
    void clear();
    std::size_t size() const;

private:
    mutable std::shared_mutex mu_;
    std::map<CacheKey, std::shared_ptr<const CacheEntry>> entries_;
};

struct Bookmark {
    E164Number number;
    RootId root_id = 0;
    Timestamp created_at = 0;
    bool operator==(const Bookmark&) const = default;
};

class BookmarkStore {
public:
    const Bookmark* find(const E164Number& n) const;
    void put(Bookmark b);
    void erase(const E164Number& n) { marks_.erase(n); }
    std::size_t size() const { return marks_.size(); }

    /// `<digits>\t<root-id>\t<iso-timestamp>` per line.
    static BookmarkStore parse(std::string_view text);
    std::string serialize() const;

private:
    std::map<E164Number, Bookmark> marks_;
};

using TransportFactory = std::function<std::unique_ptr<dns::DatagramTransport>(const dns::Endpoint&)>;

class Resolver {
public:
    explicit Resolver(RootConfig config, TransportFactory transports = {});

    const RootConfig& config() const noexcept { return cfg_; }
    RecordCache& cache() noexcept { return cache_; }
    void set_caching(bool on) { caching_ = on; }

    /// Walks Tier 0 -> Tier 1 -> Tier 2 of `root` unless the record set is
    /// cached. NxDomain for an unauthorized country code or an unregistered
    /// number; NoApplicableRecords when nothing survives selection.
    ResolutionResult resolve(const E164Number& n, RootId root, const std::optional<std::string>& service,
                             Timestamp now);

    DialOutcome resolve_dial(const DialString& raw, const std::optional<std::string>& service, Timestamp now);

    /// Queries every root (ascending id unless `order` is given) and returns
    /// all hits sorted by root id. Roots that fail contribute nothing.
    std::vector<ResolutionResult> metasearch(const E164Number& n, const std::optional<std::string>& service,
                                             Timestamp now, std::span<const RootId> order = {});

    /// Uses the bookmarked root when there is one; otherwise metasearches and
    /// bookmarks the lowest-id hit. A bookmarked root that no longer has the
    /// number drops the bookmark and rethrows.
    ResolutionResult bookmark_and_resolve(const E164Number& n, BookmarkStore& store,
                                          const std::optional<std::string>& service, Timestamp now);

private:
    RecordSet fetch_local(const EnumTree& tree, const E164Number& n, std::vector<std::string>& queried) const;
    RecordSet fetch_remote(const RemoteRoot& remote, const EnumDomain& owner, std::vector<std::string>& queried);

    RootConfig cfg_;
    TransportFactory transports_;
    RecordCache cache_;
    bool caching_ = true;
    std::uint16_t next_id_ = 0x4e55;
};

} // namespace enumkit
