#include "enumkit/resolver.hpp"

#include "enumkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <set>
#include <sstream>

namespace enumkit {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) {
            return out;
        }
        pos = tab + 1;
    }
}

RootId parse_root_id(std::string_view s, std::size_t line_no)
{
    RootId id = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        Error e(Errc::ConfigError, "line " + std::to_string(line_no) + ": bad root id '" + std::string(s) + "'");
        e.line = line_no;
        throw e;
    }
    return id;
}

template <class F>
void for_each_line(std::string_view text, F&& f)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        f(line, line_no);
    }
}

bool is_miss(Errc c)
{
    return c == Errc::NxDomain || c == Errc::NoApplicableRecords || c == Errc::Timeout ||
           c == Errc::IdMismatchExhausted || c == Errc::TransportError || c == Errc::TruncatedMessage;
}

} // namespace

void RootConfig::validate() const
{
    if (roots.empty()) {
        fail(Errc::ConfigError, "no ENUM roots configured");
    }
    if (!roots.count(default_root)) {
        fail(Errc::ConfigError, "default root " + std::to_string(default_root) + " is not configured");
    }
}

std::vector<RootLine> parse_root_registry(std::string_view text)
{
    std::vector<RootLine> out;
    std::set<RootId> seen;
    for_each_line(text, [&](const std::string& line, std::size_t line_no) {
        auto f = split_tabs(line);
        if (f.size() != 3 || f[1].empty()) {
            Error e(Errc::ConfigError, "line " + std::to_string(line_no) + ": expected <root-id>\\t<apex>\\t<local|host:port>");
            e.line = line_no;
            throw e;
        }
        RootLine r;
        r.id = parse_root_id(f[0], line_no);
        if (!seen.insert(r.id).second) {
            Error e(Errc::ConfigError, "line " + std::to_string(line_no) + ": duplicate root id " + std::string(f[0]));
            e.line = line_no;
            throw e;
        }
        r.apex = lowercase(f[1]);
        if (f[2] != "local") {
            r.remote = dns::Endpoint::parse(f[2]);
        }
        out.push_back(std::move(r));
    });
    return out;
}

std::string format_root_registry(const std::vector<RootLine>& lines)
{
    std::string out;
    for (const auto& r : lines) {
        out += std::to_string(r.id) + "\t" + r.apex + "\t" + (r.remote ? r.remote->to_string() : "local") + "\n";
    }
    return out;
}

std::optional<RecordSet> RecordCache::get(const CacheKey& key, Timestamp now) const
{
    std::shared_ptr<const CacheEntry> entry;
    {
        std::shared_lock lock(mu_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            return std::nullopt;
        }
        entry = it->second;
    }
    if (now >= entry->expires_at) {
        return std::nullopt;
    }
    return entry->value;
}

void RecordCache::put(const CacheKey& key, const RecordSet& rs, Timestamp now)
{
    if (rs.ttl_seconds == 0) {
        return;
    }
    auto entry = std::make_shared<const CacheEntry>(CacheEntry{key, rs, now + rs.ttl_seconds});
    std::unique_lock lock(mu_);
    entries_.insert_or_assign(key, std::move(entry));
}

void RecordCache::clear()
{
    std::unique_lock lock(mu_);
    entries_.clear();
}

std::size_t RecordCache::size() const
{
    std::shared_lock lock(mu_);
    return entries_.size();
}

const Bookmark* BookmarkStore::find(const E164Number& n) const
{
    auto it = marks_.find(n);
    return it == marks_.end() ? nullptr : &it->second;
}

void BookmarkStore::put(Bookmark b)
{
    auto key = b.number;
    marks_.insert_or_assign(std::move(key), std::move(b));
}

BookmarkStore BookmarkStore::parse(std::string_view text)
{
    BookmarkStore store;
    for_each_line(text, [&](const std::string& line, std::size_t line_no) {
        auto f = split_tabs(line);
        if (f.size() != 3) {
            Error e(Errc::ConfigError, "bookmark line " + std::to_string(line_no) + ": expected 3 fields");
            e.line = line_no;
            throw e;
        }
        store.put(Bookmark{E164Number::from_digits(f[0]), parse_root_id(f[1], line_no), parse_iso8601(f[2])});
    });
    return store;
}

std::string BookmarkStore::serialize() const
{
    std::string out;
    for (const auto& [n, b] : marks_) {
        out += n.digits() + "\t" + std::to_string(b.root_id) + "\t" + format_iso8601(b.created_at) + "\n";
    }
    return out;
}

Resolver::Resolver(RootConfig config, TransportFactory transports)
    : cfg_(std::move(config)), transports_(std::move(transports))
{
    cfg_.validate();
    if (!transports_) {
        transports_ = [](const dns::Endpoint& ep) { return std::make_unique<dns::UdpTransport>(ep); };
    }
}

RecordSet Resolver::fetch_local(const EnumTree& tree, const E164Number& n, std::vector<std::string>& queried) const
{
    const auto& apex = tree.apex();
    queried.push_back(apex);

    std::optional<std::string> cc;
    for (std::size_t len = std::min<std::size_t>(3, n.size()); len >= 1; --len) {
        auto prefix = n.digits().substr(0, len);
        auto it = tree.tier0().entries.find(prefix);
        if (it != tree.tier0().entries.end() && it->second.authorized && it->second.delegation) {
            cc = prefix;
            break;
        }
    }
    if (!cc) {
        fail(Errc::NxDomain, "no authorized country code covers " + n.digits() + " under " + apex);
    }

    queried.push_back(to_domain(E164Number::from_digits(*cc), apex).to_string());
    const auto* national = tree.tier1(*cc);
    auto delegation = national ? national->delegations.find(n) : decltype(national->delegations.end()){};
    if (!national || delegation == national->delegations.end()) {
        fail(Errc::NxDomain, n.digits() + " is not delegated under " + apex);
    }

    auto owner = to_domain(n, apex);
    queried.push_back(owner.to_string());
    const auto* provider = tree.tier2(delegation->second);
    const auto* rs = provider ? provider->answer(owner) : nullptr;
    if (!rs) {
        fail(Errc::NxDomain, owner.to_string() + " does not exist");
    }
    return *rs;
}

RecordSet Resolver::fetch_remote(const RemoteRoot& remote, const EnumDomain& owner, std::vector<std::string>& queried)
{
    queried.push_back(owner.to_string());
    auto query = dns::encode_query(owner.to_string(), next_id_++);
    auto transport = transports_(remote.endpoint);
    auto reply = dns::udp_exchange(*transport, query, remote.timeout, remote.retries);
    auto msg = dns::decode_response(reply);
    RecordSet rs{owner, kDefaultTtlSeconds, dns::naptr_answers(msg)};
    if (rs.records.empty()) {
        fail(Errc::NxDomain, owner.to_string() + " has no NAPTR records");
    }
    std::uint32_t ttl = msg.answers.front().ttl;
    for (const auto& rr : msg.answers) {
        ttl = std::min(ttl, rr.ttl);
    }
    rs.ttl_seconds = ttl;
    return rs;
}

ResolutionResult Resolver::resolve(const E164Number& n, RootId root, const std::optional<std::string>& service,
                                   Timestamp now)
{
    auto it = cfg_.roots.find(root);
    if (it == cfg_.roots.end()) {
        fail(Errc::UnknownRootId, "root " + std::to_string(root) + " is not configured");
    }
    const auto& entry = it->second;

    ResolutionResult result{n, root, {}, false, {}, {root}};
    CacheKey key{root, to_domain(n, entry.apex)};

    std::optional<RecordSet> rs;
    if (caching_) {
        rs = cache_.get(key, now);
    }
    if (rs) {
        result.from_cache = true;
    } else {
        if (const auto* local = std::get_if<std::shared_ptr<TreeStore>>(&entry.source)) {
            auto tree = (*local)->snapshot();
            rs = fetch_local(*tree, n, result.queried_zones);
        } else {
            rs = fetch_remote(std::get<RemoteRoot>(entry.source), key.owner, result.queried_zones);
        }
        if (caching_) {
            cache_.put(key, *rs, now);
        }
    }
    result.contacts = select_services(*rs, n.aus(), service);
    return result;
}

DialOutcome Resolver::resolve_dial(const DialString& raw, const std::optional<std::string>& service, Timestamp now)
{
    auto cls = classify_dial_string(raw, cfg_.access_codes, cfg_.dialing_context);
    if (const auto* code = std::get_if<AccessCode>(&cls)) {
        return Bypass{code->code};
    }
    if (const auto* tagged = std::get_if<ExtensionTagged>(&cls)) {
        if (!cfg_.roots.count(tagged->root_id)) {
            fail(Errc::UnknownRootId, "extension #" + std::to_string(tagged->root_id) + " names no configured root");
        }
        return resolve(tagged->number, tagged->root_id, service, now);
    }
    return resolve(std::get<E164Number>(cls), cfg_.default_root, service, now);
}

std::vector<ResolutionResult> Resolver::metasearch(const E164Number& n, const std::optional<std::string>& service,
                                                   Timestamp now, std::span<const RootId> order)
{
    std::vector<RootId> ids;
    if (order.empty()) {
        for (const auto& [id, _] : cfg_.roots) {
            ids.push_back(id);
        }
    } else {
        ids.assign(order.begin(), order.end());
    }

    std::vector<ResolutionResult> hits;
    for (auto id : ids) {
        try {
            hits.push_back(resolve(n, id, service, now));
        } catch (const Error& e) {
            if (!is_miss(e.code())) {
                throw;
            }
        }
    }
    std::sort(hits.begin(), hits.end(),
              [](const ResolutionResult& a, const ResolutionResult& b) { return a.root_id < b.root_id; });
    return hits;
}

ResolutionResult Resolver::bookmark_and_resolve(const E164Number& n, BookmarkStore& store,
                                                const std::optional<std::string>& service, Timestamp now)
{
    if (const auto* mark = store.find(n)) {
        try {
            return resolve(n, mark->root_id, service, now);
        } catch (const Error& e) {
            if (e.code() == Errc::NxDomain || e.code() == Errc::UnknownRootId) {
                store.erase(n);
            }
            throw;
        }
    }

    auto hits = metasearch(n, service, now);
    if (hits.empty()) {
        fail(Errc::NxDomain, "no configured root knows " + n.digits());
    }
    std::vector<RootId> consulted;
    for (const auto& [id, _] : cfg_.roots) {
        consulted.push_back(id);
    }
    auto winner = hits.front();
    winner.roots_consulted = consulted;
    store.put(Bookmark{n, winner.root_id, now});
    return winner;
}

} // namespace enumkit
