#include "enumkit/registry.hpp"

#include "enumkit/error.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace enumkit {

namespace {

std::string clean_field(std::string_view s)
{
    std::string out(s);
    std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
    return out;
}

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

bool valid_country_code(std::string_view cc)
{
    return !cc.empty() && cc.size() <= 3 && std::all_of(cc.begin(), cc.end(), [](char c) {
        return c >= '0' && c <= '9';
    });
}

} // namespace

std::string_view to_string(ProvisioningMode m)
{
    switch (m) {
    case ProvisioningMode::OptIn: return "optin";
    case ProvisioningMode::OptOut: return "optout";
    case ProvisioningMode::Mandated: return "mandated";
    }
    return "optin";
}

ProvisioningMode parse_provisioning_mode(std::string_view s)
{
    if (iequals(s, "optin") || iequals(s, "opt-in")) return ProvisioningMode::OptIn;
    if (iequals(s, "optout") || iequals(s, "opt-out")) return ProvisioningMode::OptOut;
    if (iequals(s, "mandated")) return ProvisioningMode::Mandated;
    fail(Errc::ConfigError, "unknown provisioning mode '" + std::string(s) + "'");
}

std::string_view to_string(Lifecycle l)
{
    return l == Lifecycle::Coupled ? "coupled" : "decoupled";
}

Lifecycle parse_lifecycle(std::string_view s)
{
    if (iequals(s, "coupled")) return Lifecycle::Coupled;
    if (iequals(s, "decoupled")) return Lifecycle::Decoupled;
    fail(Errc::ConfigError, "unknown lifecycle '" + std::string(s) + "'");
}

std::string_view to_string(AuthMethod m)
{
    switch (m) {
    case AuthMethod::CallbackCompleted: return "callback";
    case AuthMethod::PhoneBillShown: return "bill";
    case AuthMethod::LidbMatch: return "lidb";
    case AuthMethod::AniMatch: return "ani";
    case AuthMethod::DirectoryListingMatch: return "directory";
    case AuthMethod::ThirdPartyCertificate: return "certificate";
    }
    return "callback";
}

AuthMethod parse_auth_method(std::string_view s)
{
    for (auto m : {AuthMethod::CallbackCompleted, AuthMethod::PhoneBillShown, AuthMethod::LidbMatch,
                   AuthMethod::AniMatch, AuthMethod::DirectoryListingMatch, AuthMethod::ThirdPartyCertificate}) {
        if (iequals(s, to_string(m))) {
            return m;
        }
    }
    fail(Errc::InvalidArgument, "unknown evidence method '" + std::string(s) + "'");
}

std::string_view to_string(DisputeStatus s)
{
    switch (s) {
    case DisputeStatus::Open: return "open";
    case DisputeStatus::UpheldTransferred: return "upheld";
    case DisputeStatus::Denied: return "denied";
    }
    return "open";
}

DisputeStatus parse_dispute_status(std::string_view s)
{
    if (iequals(s, "open")) return DisputeStatus::Open;
    if (iequals(s, "upheld")) return DisputeStatus::UpheldTransferred;
    if (iequals(s, "denied")) return DisputeStatus::Denied;
    fail(Errc::InvalidArgument, "unknown dispute status '" + std::string(s) + "'");
}

const RecordSet* Tier2Zone::answer(const EnumDomain& owner) const
{
    auto it = record_sets.find(owner);
    if (it == record_sets.end()) {
        return nullptr;
    }
    auto n = from_domain(owner);
    if (auto c = custody.find(n); c != custody.end() && c->second.quarantine_until) {
        return nullptr;
    }
    return &it->second;
}

const Assignment* AssignmentOracle::find(const E164Number& n) const
{
    auto it = table_.find(n);
    return it == table_.end() ? nullptr : &it->second;
}

AssignmentOracle AssignmentOracle::parse_tsv(std::string_view text)
{
    AssignmentOracle oracle;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto f = split_tabs(line);
        if (f.size() != 3 || f[1].empty() || f[2].empty()) {
            Error e(Errc::ConfigError, "oracle line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
            e.line = line_no;
            throw e;
        }
        oracle.assign(E164Number::from_digits(f[0]), Assignment{std::string(f[1]), std::string(f[2])});
    }
    return oracle;
}

std::string AssignmentOracle::to_tsv() const
{
    std::string out;
    for (const auto& [n, a] : table_) {
        out += n.digits() + "\t" + a.registrant_id + "\t" + a.carrier + "\n";
    }
    return out;
}

AuthVerdict verify_assignee(const E164Number& n, const AuthEvidence& ev, const AssignmentOracle& oracle)
{
    const auto* a = oracle.find(n);
    if (!a) {
        fail(Errc::UnknownNumber, "number " + n.digits() + " is not assigned");
    }
    if (!(ev.asserted_number == n)) {
        return {false, "evidence is for a different number"};
    }
    if (ev.payload.empty()) {
        return {false, "empty evidence payload"};
    }
    if (ev.asserted_registrant != a->registrant_id) {
        return {false, "assignee of record is not " + ev.asserted_registrant};
    }
    switch (ev.method) {
    case AuthMethod::CallbackCompleted:
        if (ev.payload != "ok") {
            return {false, "callback not completed"};
        }
        break;
    case AuthMethod::PhoneBillShown:
    case AuthMethod::LidbMatch:
        if (ev.payload != a->carrier) {
            return {false, "carrier " + ev.payload + " does not hold this number"};
        }
        break;
    case AuthMethod::AniMatch:
        if (ev.payload != n.digits()) {
            return {false, "ANI " + ev.payload + " does not match"};
        }
        break;
    case AuthMethod::DirectoryListingMatch:
        if (ev.payload != a->registrant_id) {
            return {false, "directory listing names " + ev.payload};
        }
        break;
    case AuthMethod::ThirdPartyCertificate:
        if (!oracle.trusts(ev.payload)) {
            return {false, "verifier " + ev.payload + " is not trusted"};
        }
        break;
    }
    return {true, std::string(to_string(ev.method))};
}

std::string format_audit_line(const AuditEntry& e)
{
    return std::to_string(e.seq) + "\t" + format_iso8601(e.timestamp) + "\t" + e.actor + "\t" + e.action + "\t" +
           (e.number ? e.number->digits() : std::string("-")) + "\t" + e.detail;
}

AuditEntry parse_audit_line(std::string_view line)
{
    auto f = split_tabs(line);
    if (f.size() != 6) {
        fail(Errc::ConfigError, "audit line needs 6 fields: '" + std::string(line) + "'");
    }
    AuditEntry e;
    auto [ptr, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), e.seq);
    if (ec != std::errc{} || ptr != f[0].data() + f[0].size()) {
        fail(Errc::ConfigError, "bad audit seq '" + std::string(f[0]) + "'");
    }
    e.timestamp = parse_iso8601(f[1]);
    e.actor = std::string(f[2]);
    e.action = std::string(f[3]);
    if (f[4] != "-") {
        e.number = E164Number::from_digits(f[4]);
    }
    e.detail = std::string(f[5]);
    return e;
}

std::optional<std::string> detail_field(std::string_view detail, std::string_view key)
{
    std::size_t pos = 0;
    while (pos < detail.size()) {
        auto space = detail.find(' ', pos);
        auto item = detail.substr(pos, space == std::string_view::npos ? std::string_view::npos : space - pos);
        if (item.size() > key.size() && item.starts_with(key) && item[key.size()] == '=') {
            return std::string(item.substr(key.size() + 1));
        }
        if (space == std::string_view::npos) {
            break;
        }
        pos = space + 1;
    }
    return std::nullopt;
}

EnumTree::EnumTree(TreeConfig config)
{
    s_.config = std::move(config);
    s_.config.apex = lowercase(s_.config.apex);
    s_.tier0.apex = s_.config.apex;
}

EnumTree EnumTree::from_state(TreeState state)
{
    EnumTree t;
    t.s_ = std::move(state);
    for (std::size_t i = 0; i < t.s_.audit.size(); ++i) {
        if (t.s_.audit[i].seq != i + 1) {
            fail(Errc::ConfigError, "audit log is not gapless at entry " + std::to_string(i + 1));
        }
    }
    return t;
}

const Tier1Zone* EnumTree::tier1(const std::string& cc) const
{
    auto it = s_.tier1.find(cc);
    return it == s_.tier1.end() ? nullptr : &it->second;
}

const Tier2Zone* EnumTree::tier2(const std::string& provider) const
{
    auto it = s_.tier2.find(provider);
    return it == s_.tier2.end() ? nullptr : &it->second;
}

std::optional<std::string> EnumTree::country_code_of(const E164Number& n) const
{
    for (std::size_t len = std::min<std::size_t>(3, n.size()); len >= 1; --len) {
        auto cc = n.digits().substr(0, len);
        if (s_.tier1.count(cc)) {
            return cc;
        }
    }
    return std::nullopt;
}

std::optional<std::string> EnumTree::holder_of(const E164Number& n) const
{
    auto cc = country_code_of(n);
    if (!cc) {
        return std::nullopt;
    }
    const auto& d = s_.tier1.at(*cc).delegations;
    auto it = d.find(n);
    if (it == d.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<Holding> EnumTree::registration(const E164Number& n) const
{
    auto provider = holder_of(n);
    if (!provider) {
        return std::nullopt;
    }
    const auto* zone = tier2(*provider);
    if (!zone) {
        return std::nullopt;
    }
    auto r = zone->registrant_index.find(n);
    if (r == zone->registrant_index.end()) {
        return std::nullopt;
    }
    return Holding{zone, &r->second, &zone->record_sets.at(to_domain(n, apex()))};
}

Tier2Zone& EnumTree::zone_holding(const E164Number& n)
{
    auto provider = holder_of(n);
    if (!provider || !s_.tier2.count(*provider) || !s_.tier2.at(*provider).registrant_index.count(n)) {
        fail(Errc::NoSuchRegistration, "number " + n.digits() + " is not registered");
    }
    return s_.tier2.at(*provider);
}

std::uint64_t EnumTree::append(const std::string& actor, std::string action, std::optional<E164Number> number,
                               std::string detail, Timestamp now)
{
    AuditEntry e;
    e.seq = next_seq();
    e.timestamp = now;
    e.actor = clean_field(actor);
    e.action = clean_field(action);
    e.number = std::move(number);
    e.detail = clean_field(detail);
    s_.audit.push_back(std::move(e));
    return s_.audit.back().seq;
}

std::uint64_t EnumTree::add_provider(const std::string& actor, const std::string& provider, ProvisioningMode mode,
                                     Timestamp now)
{
    if (provider.empty()) {
        fail(Errc::InvalidArgument, "empty provider id");
    }
    if (s_.tier2.count(provider)) {
        fail(Errc::InvalidArgument, "provider " + provider + " already exists");
    }
    Tier2Zone zone;
    zone.provider_id = provider;
    zone.mode = mode;
    s_.tier2.emplace(provider, std::move(zone));
    return append(actor, "add-provider", std::nullopt,
                  "provider=" + provider + " mode=" + std::string(to_string(mode)), now);
}

std::uint64_t EnumTree::add_enrolling_authority(const std::string& actor, const std::string& authority,
                                                Timestamp now)
{
    if (authority.empty()) {
        fail(Errc::InvalidArgument, "empty authority id");
    }
    s_.enrolling_authorities.insert(authority);
    return append(actor, "add-authority", std::nullopt, "authority=" + authority, now);
}

std::uint64_t EnumTree::trust_verifier(const std::string& actor, const std::string& verifier, Timestamp now)
{
    if (verifier.empty()) {
        fail(Errc::InvalidArgument, "empty verifier id");
    }
    s_.oracle.trust_verifier(verifier);
    return append(actor, "trust-verifier", std::nullopt, "verifier=" + verifier, now);
}

std::uint64_t EnumTree::assign_number(const std::string& actor, const E164Number& n, Assignment a, Timestamp now)
{
    auto detail = "registrant=" + a.registrant_id + " carrier=" + a.carrier;
    s_.oracle.assign(n, std::move(a));
    return append(actor, "assign", n, detail, now);
}

std::uint64_t EnumTree::stage_national_zone(const std::string& actor, const std::string& cc,
                                            const std::string& provider, Timestamp now)
{
    if (!valid_country_code(cc)) {
        fail(Errc::InvalidCountryCode, "country code '" + cc + "' must be 1-3 digits");
    }
    if (s_.tier1.count(cc)) {
        fail(Errc::AlreadyAuthorized, "national zone for " + cc + " already exists");
    }
    s_.tier1.emplace(cc, Tier1Zone{cc, provider, {}});
    s_.tier0.entries.try_emplace(cc);
    return append(actor, "stage-cc", E164Number::from_digits(cc), "provider=" + provider, now);
}

std::uint64_t EnumTree::authorize_country(const std::string& actor, const std::string& cc,
                                          const std::string& provider, Timestamp now)
{
    if (!valid_country_code(cc)) {
        fail(Errc::InvalidCountryCode, "country code '" + cc + "' must be 1-3 digits");
    }
    if (auto it = s_.tier0.entries.find(cc); it != s_.tier0.entries.end() && it->second.authorized) {
        fail(Errc::AlreadyAuthorized, "country code " + cc + " is already authorized");
    }
    if (auto it = s_.tier1.find(cc); it != s_.tier1.end() && it->second.provider_id != provider) {
        fail(Errc::ProviderMismatch, "national zone " + cc + " is staged for " + it->second.provider_id);
    }
    s_.tier1.try_emplace(cc, Tier1Zone{cc, provider, {}});
    s_.tier0.entries[cc] = Tier0Entry{true, provider};
    return append(actor, "authorize-cc", E164Number::from_digits(cc), "provider=" + provider, now);
}

std::uint64_t EnumTree::delegate_number(const std::string& actor, const std::string& cc, const E164Number& n,
                                        const std::string& tier2_provider, Timestamp now)
{
    auto it = s_.tier1.find(cc);
    if (it == s_.tier1.end()) {
        fail(Errc::UnknownCountry, "no national zone for country code " + cc);
    }
    if (!n.has_prefix(cc)) {
        fail(Errc::WrongCountryCode, "number " + n.digits() + " is not under country code " + cc);
    }
    if (!s_.tier2.count(tier2_provider)) {
        fail(Errc::UnknownProvider, "unknown Tier-2 provider " + tier2_provider);
    }
    if (it->second.delegations.count(n)) {
        fail(Errc::AlreadyDelegated, "number " + n.digits() + " is already delegated");
    }
    it->second.delegations.emplace(n, tier2_provider);
    return append(actor, "delegate", n, "cc=" + cc + " provider=" + tier2_provider, now);
}

std::uint64_t EnumTree::register_number(const std::string& actor, const std::string& provider, const E164Number& n,
                                        Registrant registrant, const std::optional<AuthEvidence>& evidence,
                                        RecordSet records, Timestamp now)
{
    auto zit = s_.tier2.find(provider);
    if (zit == s_.tier2.end()) {
        fail(Errc::UnknownProvider, "unknown Tier-2 provider " + provider);
    }
    auto& zone = zit->second;
    if (holder_of(n) != provider) {
        fail(Errc::NotDelegatedHere, "number " + n.digits() + " is not delegated to " + provider);
    }
    if (zone.registrant_index.count(n)) {
        fail(Errc::DuplicateRegistration, "number " + n.digits() + " is already registered");
    }

    if (s_.config.enforce_auth) {
        std::string refusal;
        if (zone.mode == ProvisioningMode::OptIn) {
            if (!evidence) {
                refusal = "no evidence";
            } else if (evidence->asserted_registrant != registrant.id) {
                refusal = "evidence names " + evidence->asserted_registrant;
            } else if (auto v = verify_assignee(n, *evidence, s_.oracle); !v.accepted) {
                refusal = v.reason;
            }
        } else if (!s_.enrolling_authorities.count(actor)) {
            refusal = actor + " is not an enrolling authority";
        }
        if (!refusal.empty()) {
            append(actor, "register-denied", n, "registrant=" + registrant.id + " reason=" + refusal, now);
            fail(Errc::AuthFailed, "registration of " + n.digits() + " refused: " + refusal);
        }
    }

    if (registrant.carrier.empty()) {
        if (const auto* a = s_.oracle.find(n)) {
            registrant.carrier = a->carrier;
        }
    }
    registrant.state = SubscriptionState{};
    auto owner = to_domain(n, apex());
    records.owner = owner;
    auto detail = "registrant=" + registrant.id + " provider=" + provider +
                  " mode=" + std::string(to_string(zone.mode)) + " records=" +
                  std::to_string(records.records.size());
    zone.record_sets.insert_or_assign(owner, std::move(records));
    zone.registrant_index.insert_or_assign(n, std::move(registrant));
    zone.custody[n] = Custody{zone.mode == ProvisioningMode::OptOut, std::nullopt};
    return append(actor, "register", n, detail, now);
}

std::uint64_t EnumTree::update_records(const std::string& actor, const E164Number& n, RecordSet records,
                                       Timestamp now)
{
    auto& zone = zone_holding(n);
    const auto& holder = zone.registrant_index.at(n);
    if (zone.custody[n].quarantine_until) {
        fail(Errc::NoSuchRegistration, "number " + n.digits() + " is quarantined");
    }
    if (s_.config.enforce_auth && actor != holder.id) {
        append(actor, "update-denied", n, "registrant=" + holder.id + " reason=not-registrant", now);
        fail(Errc::AuthFailed, actor + " may not update " + n.digits());
    }
    auto owner = to_domain(n, apex());
    records.owner = owner;
    auto detail = "registrant=" + holder.id + " records=" + std::to_string(records.records.size());
    zone.record_sets.insert_or_assign(owner, std::move(records));
    return append(actor, "update", n, detail, now);
}

std::uint64_t EnumTree::opt_out(const std::string& actor, const E164Number& n, Timestamp now)
{
    auto& zone = zone_holding(n);
    auto holder = zone.registrant_index.at(n).id;
    if (!zone.custody[n].opt_out_enrolled) {
        fail(Errc::InvalidArgument, "number " + n.digits() + " was not bulk-enrolled with an opt-out");
    }
    if (s_.config.enforce_auth && actor != holder) {
        append(actor, "opt-out-denied", n, "registrant=" + holder + " reason=not-registrant", now);
        fail(Errc::AuthFailed, actor + " may not opt out " + n.digits());
    }
    zone.record_sets.erase(to_domain(n, apex()));
    zone.registrant_index.erase(n);
    zone.custody.erase(n);
    return append(actor, "opt-out", n, "registrant=" + holder, now);
}

std::uint64_t EnumTree::port_number(const std::string& actor, const E164Number& n, const std::string& from_carrier,
                                    const std::string& to_carrier, Timestamp now)
{
    const auto* a = s_.oracle.find(n);
    if (!a) {
        fail(Errc::UnknownNumber, "number " + n.digits() + " is not assigned");
    }
    if (a->carrier != from_carrier) {
        fail(Errc::WrongCarrier, "number " + n.digits() + " is held by " + a->carrier + ", not " + from_carrier);
    }
    s_.oracle.assign(n, Assignment{a->registrant_id, to_carrier});
    if (auto provider = holder_of(n)) {
        if (auto z = s_.tier2.find(*provider); z != s_.tier2.end()) {
            if (auto r = z->second.registrant_index.find(n); r != z->second.registrant_index.end()) {
                r->second.state = SubscriptionState{SubscriptionState::Kind::Ported, to_carrier, 0};
                r->second.carrier = to_carrier;
            }
        }
    }
    return append(actor, "port", n, "from=" + from_carrier + " to=" + to_carrier, now);
}

std::uint64_t EnumTree::disconnect_number(const std::string& actor, const E164Number& n, Timestamp now,
                                          std::optional<Lifecycle> lifecycle)
{
    if (!s_.oracle.find(n)) {
        fail(Errc::UnknownNumber, "number " + n.digits() + " is not assigned");
    }
    auto mode = lifecycle.value_or(s_.config.lifecycle);
    s_.oracle.remove(n);
    std::string detail = "lifecycle=" + std::string(to_string(mode));
    if (auto provider = holder_of(n)) {
        if (auto z = s_.tier2.find(*provider); z != s_.tier2.end()) {
            auto& zone = z->second;
            if (auto r = zone.registrant_index.find(n); r != zone.registrant_index.end()) {
                r->second.state = SubscriptionState{SubscriptionState::Kind::Disconnected, {}, now};
                if (mode == Lifecycle::Coupled) {
                    auto until = now + s_.config.quarantine_days * kSecondsPerDay;
                    zone.custody[n].quarantine_until = until;
                    detail += " quarantine_until=" + format_iso8601(until);
                }
            }
        }
    }
    return append(actor, "disconnect", n, detail, now);
}

std::size_t EnumTree::purge_quarantine(const std::string& actor, Timestamp now)
{
    std::size_t purged = 0;
    for (auto& [provider, zone] : s_.tier2) {
        std::vector<E164Number> due;
        for (const auto& [n, c] : zone.custody) {
            if (c.quarantine_until && *c.quarantine_until <= now) {
                due.push_back(n);
            }
        }
        for (const auto& n : due) {
            auto owner = to_domain(n, apex());
            auto holder = zone.registrant_index.at(n).id;
            s_.archive.push_back(ArchivedRecordSet{n, holder, now, "purge", zone.record_sets.at(owner)});
            zone.record_sets.erase(owner);
            zone.registrant_index.erase(n);
            zone.custody.erase(n);
            append(actor, "purge", n, "registrant=" + holder, now);
            ++purged;
        }
    }
    return purged;
}

DisputeChallenge EnumTree::file_dispute(const std::string& challenger, const E164Number& n,
                                        const std::string& grounds, Timestamp now)
{
    zone_holding(n);
    for (const auto& d : s_.disputes) {
        if (d.number == n && d.status == DisputeStatus::Open) {
            fail(Errc::OpenChallengeExists, "number " + n.digits() + " already has an open challenge");
        }
    }
    DisputeChallenge c{s_.disputes.size() + 1, n, clean_field(challenger), clean_field(grounds),
                       DisputeStatus::Open, now};
    s_.disputes.push_back(c);
    append(challenger, "dispute-filed", n, "challenge=" + std::to_string(c.id) + " grounds=" + c.grounds, now);
    return c;
}

DisputeChallenge EnumTree::resolve_dispute(const std::string& actor, const E164Number& n, DisputeStatus outcome,
                                           Timestamp now)
{
    if (outcome == DisputeStatus::Open) {
        fail(Errc::InvalidArgument, "a dispute cannot be resolved as open");
    }
    auto it = std::find_if(s_.disputes.begin(), s_.disputes.end(), [&](const DisputeChallenge& d) {
        return d.number == n && d.status == DisputeStatus::Open;
    });
    if (it == s_.disputes.end()) {
        fail(Errc::NoOpenChallenge, "no open challenge on " + n.digits());
    }
    auto& zone = zone_holding(n);
    it->status = outcome;
    std::string detail = "challenge=" + std::to_string(it->id);

    if (outcome == DisputeStatus::UpheldTransferred) {
        auto& holder = zone.registrant_index.at(n);
        auto owner = to_domain(n, apex());
        s_.archive.push_back(ArchivedRecordSet{n, holder.id, now, "dispute", zone.record_sets.at(owner)});
        detail = "registrant=" + it->challenger + " previous=" + holder.id + " " + detail;
        holder = Registrant{it->challenger, it->challenger, SubscriptionState{}, holder.carrier};
        append(actor, "dispute-upheld", n, detail, now);
    } else {
        append(actor, "dispute-denied", n, detail, now);
    }
    return *it;
}

std::uint64_t EnumTree::load_records(const std::string& actor, const RecordSet& records, Timestamp now)
{
    auto n = from_domain(records.owner);
    if (records.owner.apex() != apex()) {
        fail(Errc::ApexMismatch, "record set " + records.owner.to_string() + " is not under " + apex());
    }
    auto& zone = zone_holding(n);
    zone.record_sets.insert_or_assign(records.owner, records);
    return append(actor, "import", n,
                  "registrant=" + zone.registrant_index.at(n).id + " records=" +
                      std::to_string(records.records.size()),
                  now);
}

} // namespace enumkit
