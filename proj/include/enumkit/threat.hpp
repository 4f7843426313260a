#pragma once

// Scripted registry-data attacks (hijack, eavesdrop, denial of service)
// against a seeded tree, with detection by audit-log replay.

#include "enumkit/registry.hpp"
#include "enumkit/resolver.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace enumkit::threat {

enum class ScenarioKind { Hijack, Eavesdrop, DenialOfService };

std::string_view to_string(ScenarioKind k);
/// "hijack", "eavesdrop", "dos". UnknownScenario otherwise.
ScenarioKind parse_scenario_kind(std::string_view s);

struct ScriptStep {
    unsigned no = 0;
    std::string actor;
    std::string action; // resolve | update | relay | unrelay | advance
    std::vector<std::string> args;
    bool operator==(const ScriptStep&) const = default;
};

/// `<step-no>\t<actor>\t<action>\t<args...>` per line.
std::vector<ScriptStep> parse_script(std::string_view text);
std::string format_script(const std::vector<ScriptStep>& steps);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Hijack;
    E164Number victim;
    std::string attacker;
    std::string attacker_contact; // URI the attacker wants callers to reach
    std::vector<ScriptStep> steps;
};

struct ScenarioReport {
    ScenarioKind kind = ScenarioKind::Hijack;
    bool enforcement = true;
    bool attack_succeeded = false;
    bool detected = false;
    std::vector<std::uint64_t> evidence; // seqs of unauthorized accepted mutations
    std::vector<std::uint64_t> blocked;  // seqs of refused attempts
    std::vector<std::string> before;
    std::vector<std::string> after;
    bool end_to_end_reachable = false; // eavesdrop: relay still forwards to the original
};

/// A victim, attacker and caller over a one-root tree with a caching resolver.
class ThreatEnv {
public:
    static constexpr RootId kRoot = 1;

    /// ACME holds 18005550100 -> sip:callcenter@acme.example; BETA competes;
    /// CHARLIE calls.
    static ThreatEnv sample(bool enforce);

    ThreatEnv(std::shared_ptr<TreeStore> store, Timestamp now, std::set<std::string> actors);

    TreeStore& store() { return *store_; }
    Resolver& resolver() { return *resolver_; }
    Timestamp now() const noexcept { return now_; }
    void advance(Timestamp seconds) { now_ += seconds; }
    const std::set<std::string>& actors() const noexcept { return actors_; }

    std::map<std::string, std::string> relays; // relay URI -> forward target

private:
    std::shared_ptr<TreeStore> store_;
    std::unique_ptr<Resolver> resolver_;
    Timestamp now_;
    std::set<std::string> actors_;
};

/// Seqs of accepted mutations whose actor is not the registrant of record at
/// that point in the log.
std::vector<std::uint64_t> detect_unauthorized(const std::vector<AuditEntry>& audit);

Scenario default_scenario(ScenarioKind kind, const E164Number& victim, const std::string& attacker);

/// Steps may only name actors known to `env`; InvalidArgument otherwise.
ScenarioReport run_scenario(ThreatEnv& env, const Scenario& scenario);

ScenarioReport run_hijack(ThreatEnv& env, const E164Number& victim, const std::string& attacker);
ScenarioReport run_eavesdrop(ThreatEnv& env, const E164Number& victim, const std::string& attacker);
ScenarioReport run_dos(ThreatEnv& env, const E164Number& victim, const std::string& attacker);

std::string format_report_text(const ScenarioReport& r);
/// key\tvalue lines; list values are comma separated.
std::string format_report_tsv(const ScenarioReport& r);

} // namespace enumkit::threat
