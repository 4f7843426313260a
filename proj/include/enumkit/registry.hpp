#pragma once

// Simulated three-tier ENUM database.
//
// Tier 0 holds country-code delegations, each gated on national
// authorization. Tier 1 (one designated provider per country code) points
// numbers at Tier 2 providers. Tier 2 providers hold the NAPTR record sets
// together with the registrant of record. Every mutation goes through
// EnumTree and appends to the tree's audit log.

#include "enumkit/clock.hpp"
#include "enumkit/e164.hpp"
#include "enumkit/naptr.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <type_traits>
#include <utility>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace enumkit {

enum class ProvisioningMode { OptIn, OptOut, Mandated };
enum class Lifecycle { Coupled, Decoupled };

std::string_view to_string(ProvisioningMode m);
ProvisioningMode parse_provisioning_mode(std::string_view s);
std::string_view to_string(Lifecycle l);
Lifecycle parse_lifecycle(std::string_view s);

struct Tier0Entry {
    bool authorized = false;
    std::optional<std::string> delegation; // Tier-1 provider id
    bool operator==(const Tier0Entry&) const = default;
};

struct Tier0Zone {
    std::string apex;
    std::map<std::string, Tier0Entry> entries; // keyed by country code
    bool operator==(const Tier0Zone&) const = default;
};

struct Tier1Zone {
    std::string country_code;
    std::string provider_id;
    std::map<E164Number, std::string> delegations; // number -> Tier-2 provider
    bool operator==(const Tier1Zone&) const = default;
};

struct SubscriptionState {
    enum class Kind { Active, Ported, Disconnected };
    Kind kind = Kind::Active;
    std::string to_carrier; // Ported
    Timestamp at = 0;       // Disconnected
    bool operator==(const SubscriptionState&) const = default;
};

struct Registrant {
    std::string id;
    std::string display_name;
    SubscriptionState state;
    std::string carrier;
    bool operator==(const Registrant&) const = default;
};

/// Provider-side bookkeeping that is not part of the published records.
struct Custody {
    bool opt_out_enrolled = false;
    std::optional<Timestamp> quarantine_until;
    bool operator==(const Custody&) const = default;
};

struct Tier2Zone {
    std::string provider_id;
    ProvisioningMode mode = ProvisioningMode::OptIn;
    std::map<EnumDomain, RecordSet> record_sets;
    std::map<E164Number, Registrant> registrant_index;
    std::map<E164Number, Custody> custody;

    /// The published record set for `owner`, or null (absent or quarantined).
    const RecordSet* answer(const EnumDomain& owner) const;

    bool operator==(const Tier2Zone&) const = default;
};

// Telephone-number assignment, standing in for LIDB, billing and directory
// sources.

struct Assignment {
    std::string registrant_id;
    std::string carrier;
    bool operator==(const Assignment&) const = default;
};

class AssignmentOracle {
public:
    void assign(const E164Number& n, Assignment a) { table_[n] = std::move(a); }
    void remove(const E164Number& n) { table_.erase(n); }
    const Assignment* find(const E164Number& n) const;
    const std::map<E164Number, Assignment>& table() const { return table_; }

    void trust_verifier(std::string id) { trusted_verifiers_.insert(std::move(id)); }
    bool trusts(const std::string& id) const { return trusted_verifiers_.count(id) != 0; }
    const std::set<std::string>& trusted_verifiers() const { return trusted_verifiers_; }

    /// `<digits>\t<registrant-id>\t<carrier>` per line.
    static AssignmentOracle parse_tsv(std::string_view text);
    std::string to_tsv() const;

    bool operator==(const AssignmentOracle&) const = default;

private:
    std::map<E164Number, Assignment> table_;
    std::set<std::string> trusted_verifiers_;
};

enum class AuthMethod {
    CallbackCompleted,
    PhoneBillShown,
    LidbMatch,
    AniMatch,
    DirectoryListingMatch,
    ThirdPartyCertificate,
};

std::string_view to_string(AuthMethod m);
AuthMethod parse_auth_method(std::string_view s);

/// Payload meaning per method:
///   CallbackCompleted      "ok" once the callback to the number was answered
///   PhoneBillShown         carrier named on the bill
///   LidbMatch              carrier whose LIDB was queried
///   AniMatch               ANI digits delivered by the network
///   DirectoryListingMatch  registrant id shown in the listing
///   ThirdPartyCertificate  id of the issuing verification service
struct AuthEvidence {
    AuthMethod method = AuthMethod::CallbackCompleted;
    std::string payload;
    E164Number asserted_number;
    std::string asserted_registrant;
};

struct AuthVerdict {
    bool accepted = false;
    std::string reason;
};

/// Deterministic for a fixed oracle. Throws UnknownNumber when the number is
/// not assigned to anyone.
AuthVerdict verify_assignee(const E164Number& n, const AuthEvidence& ev, const AssignmentOracle& oracle);

struct AuditEntry {
    std::uint64_t seq = 0;
    Timestamp timestamp = 0;
    std::string actor;
    std::string action;
    std::optional<E164Number> number;
    std::string detail;
    bool operator==(const AuditEntry&) const = default;
};

/// `seq\tiso-timestamp\tactor\taction\tdigits\tdetail`; "-" for no number.
std::string format_audit_line(const AuditEntry& e);
AuditEntry parse_audit_line(std::string_view line);

/// Value of `key=` in a space-separated audit detail, if present.
std::optional<std::string> detail_field(std::string_view detail, std::string_view key);

enum class DisputeStatus { Open, UpheldTransferred, Denied };
std::string_view to_string(DisputeStatus s);
DisputeStatus parse_dispute_status(std::string_view s);

struct DisputeChallenge {
    std::uint64_t id = 0;
    E164Number number;
    std::string challenger;
    std::string grounds;
    DisputeStatus status = DisputeStatus::Open;
    Timestamp filed_at = 0;
    bool operator==(const DisputeChallenge&) const = default;
};

struct ArchivedRecordSet {
    E164Number number;
    std::string registrant_id;
    Timestamp archived_at = 0;
    std::string reason;
    RecordSet records;
    bool operator==(const ArchivedRecordSet&) const = default;
};

struct TreeConfig {
    std::string apex = "e164.arpa";
    Lifecycle lifecycle = Lifecycle::Coupled;
    int quarantine_days = 30;
    bool enforce_auth = true;
    bool operator==(const TreeConfig&) const = default;
};

/// Everything a tree holds; plain data so it can be persisted and compared.
struct TreeState {
    TreeConfig config;
    Tier0Zone tier0;
    std::map<std::string, Tier1Zone> tier1; // by country code
    std::map<std::string, Tier2Zone> tier2; // by provider id
    std::set<std::string> enrolling_authorities;
    AssignmentOracle oracle;
    std::vector<AuditEntry> audit;
    std::vector<DisputeChallenge> disputes;
    std::vector<ArchivedRecordSet> archive;
    bool operator==(const TreeState&) const = default;
};

/// Location of a registration inside the tree.
struct Holding {
    const Tier2Zone* zone = nullptr;
    const Registrant* registrant = nullptr;
    const RecordSet* records = nullptr;
};

class EnumTree {
public:
    explicit EnumTree(TreeConfig config = {});
    static EnumTree from_state(TreeState state);

    const TreeState& state() const noexcept { return s_; }
    const TreeConfig& config() const noexcept { return s_.config; }
    const std::string& apex() const noexcept { return s_.config.apex; }
    const Tier0Zone& tier0() const noexcept { return s_.tier0; }
    const Tier1Zone* tier1(const std::string& cc) const;
    const Tier2Zone* tier2(const std::string& provider) const;
    const AssignmentOracle& oracle() const noexcept { return s_.oracle; }
    const std::vector<AuditEntry>& audit() const noexcept { return s_.audit; }
    const std::vector<DisputeChallenge>& disputes() const noexcept { return s_.disputes; }
    const std::vector<ArchivedRecordSet>& archive() const noexcept { return s_.archive; }

    /// Country code whose Tier-1 zone covers `n` (staged or authorized).
    std::optional<std::string> country_code_of(const E164Number& n) const;
    /// Tier-2 provider `n` is delegated to.
    std::optional<std::string> holder_of(const E164Number& n) const;
    std::optional<Holding> registration(const E164Number& n) const;

    void set_enforcement(bool on) { s_.config.enforce_auth = on; }

    // Setup. Each returns the audit seq it appended.
    std::uint64_t add_provider(const std::string& actor, const std::string& provider, ProvisioningMode mode,
                               Timestamp now);
    std::uint64_t add_enrolling_authority(const std::string& actor, const std::string& authority, Timestamp now);
    /// Lets certificates issued by `verifier` count as evidence.
    std::uint64_t trust_verifier(const std::string& actor, const std::string& verifier, Timestamp now);
    std::uint64_t assign_number(const std::string& actor, const E164Number& n, Assignment a, Timestamp now);
    /// Creates a national zone that Tier 0 does not point at yet.
    std::uint64_t stage_national_zone(const std::string& actor, const std::string& cc, const std::string& provider,
                                      Timestamp now);

    std::uint64_t authorize_country(const std::string& actor, const std::string& cc, const std::string& provider,
                                    Timestamp now);
    std::uint64_t delegate_number(const std::string& actor, const std::string& cc, const E164Number& n,
                                  const std::string& tier2_provider, Timestamp now);

    /// OptIn zones require accepted evidence; OptOut/Mandated zones require
    /// `actor` to be an enrolling authority. The record set is stored under
    /// to_domain(n).
    std::uint64_t register_number(const std::string& actor, const std::string& provider, const E164Number& n,
                                  Registrant registrant, const std::optional<AuthEvidence>& evidence,
                                  RecordSet records, Timestamp now);
    std::uint64_t update_records(const std::string& actor, const E164Number& n, RecordSet records, Timestamp now);
    std::uint64_t opt_out(const std::string& actor, const E164Number& n, Timestamp now);

    std::uint64_t port_number(const std::string& actor, const E164Number& n, const std::string& from_carrier,
                              const std::string& to_carrier, Timestamp now);
    std::uint64_t disconnect_number(const std::string& actor, const E164Number& n, Timestamp now,
                                    std::optional<Lifecycle> lifecycle = std::nullopt);
    /// Deletes quarantined record sets whose quarantine has ended. Returns the
    /// number of registrations removed.
    std::size_t purge_quarantine(const std::string& actor, Timestamp now);

    DisputeChallenge file_dispute(const std::string& challenger, const E164Number& n, const std::string& grounds,
                                  Timestamp now);
    DisputeChallenge resolve_dispute(const std::string& actor, const E164Number& n, DisputeStatus outcome,
                                     Timestamp now);

    /// Replaces the published records of existing registrations without
    /// touching registrants. Used by zone import.
    std::uint64_t load_records(const std::string& actor, const RecordSet& records, Timestamp now);

    std::uint64_t next_seq() const noexcept { return s_.audit.size() + 1; }

private:
    std::uint64_t append(const std::string& actor, std::string action, std::optional<E164Number> number,
                         std::string detail, Timestamp now);
    Tier2Zone& zone_holding(const E164Number& n);

    TreeState s_;
};

/// Single-writer / multi-reader wrapper. Readers take immutable snapshots;
/// writers apply each mutation to a private copy and publish it whole.
class TreeStore {
public:
    explicit TreeStore(EnumTree tree) : current_(std::make_shared<const EnumTree>(std::move(tree))) {}

    std::shared_ptr<const EnumTree> snapshot() const
    {
        std::lock_guard lock(read_mu_);
        return current_;
    }

    /// Runs `f` against a copy of the tree. The copy is published when `f`
    /// returns, and also when it throws after appending audit entries so that
    /// refused attempts stay on record.
    template <class F>
    auto mutate(F&& f) -> decltype(f(std::declval<EnumTree&>()))
    {
        std::lock_guard writer(write_mu_);
        auto next = std::make_shared<EnumTree>(*snapshot());
        auto before = next->audit().size();
        try {
            if constexpr (std::is_void_v<decltype(f(*next))>) {
                f(*next);
                publish(std::move(next));
            } else {
                auto result = f(*next);
                publish(std::move(next));
                return result;
            }
        } catch (...) {
            if (next && next->audit().size() != before) {
                publish(std::move(next));
            }
            throw;
        }
    }

private:
    void publish(std::shared_ptr<EnumTree> next)
    {
        std::lock_guard lock(read_mu_);
        current_ = std::move(next);
    }

    mutable std::mutex read_mu_;
    std::mutex write_mu_;
    std::shared_ptr<const EnumTree> current_;
};

} // namespace enumkit
