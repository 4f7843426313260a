#include "enumkit/threat.hpp"

#include "enumkit/error.hpp"

#include <charconv>
#include <sstream>

namespace enumkit::threat {

namespace {

const char* const kVictimDigits = "18005550100";
const char* const kAcmeSip = "sip:callcenter@acme.example";
const char* const kBetaSip = "sip:sales@beta.example";
const char* const kBetaRelay = "sip:relay@beta.example";

std::string sip_rule(std::string_view uri, std::string_view pattern = "^.*$")
{
    RewriteRule r{'!', std::string(pattern), std::string(uri)};
    return "IN NAPTR 10 10 \"u\" \"E2U+sip\" " + quote_character_string(r.to_string()) + " .";
}

std::vector<std::string> render(const std::vector<ContactUri>& contacts)
{
    std::vector<std::string> out;
    for (const auto& c : contacts) {
        out.push_back(c.render());
    }
    return out;
}

std::string join(const std::vector<std::string>& v, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? std::string(sep) : std::string()) + v[i];
    }
    return out;
}

std::string join(const std::vector<std::uint64_t>& v)
{
    std::vector<std::string> s;
    for (auto x : v) {
        s.push_back(std::to_string(x));
    }
    return join(s, ",");
}

} // namespace

std::string_view to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::Hijack: return "hijack";
    case ScenarioKind::Eavesdrop: return "eavesdrop";
    case ScenarioKind::DenialOfService: return "dos";
    }
    return "?";
}

ScenarioKind parse_scenario_kind(std::string_view s)
{
    if (s == "hijack") return ScenarioKind::Hijack;
    if (s == "eavesdrop") return ScenarioKind::Eavesdrop;
    if (s == "dos") return ScenarioKind::DenialOfService;
    fail(Errc::UnknownScenario, "unknown scenario '" + std::string(s) + "'");
}

std::vector<ScriptStep> parse_script(std::string_view text)
{
    std::vector<ScriptStep> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::vector<std::string> f;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            f.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        ScriptStep step;
        auto [p, ec] = std::from_chars(f[0].data(), f[0].data() + f[0].size(), step.no);
        if (f.size() < 3 || ec != std::errc{} || p != f[0].data() + f[0].size() || f[1].empty() || f[2].empty()) {
            Error e(Errc::SyntaxError, "script line " + std::to_string(line_no) + ": expected <step>\\t<actor>\\t<action>");
            e.line = line_no;
            throw e;
        }
        step.actor = f[1];
        step.action = f[2];
        step.args.assign(f.begin() + 3, f.end());
        out.push_back(std::move(step));
    }
    return out;
}

std::string format_script(const std::vector<ScriptStep>& steps)
{
    std::string out;
    for (const auto& s : steps) {
        out += std::to_string(s.no) + "\t" + s.actor + "\t" + s.action;
        for (const auto& a : s.args) {
            out += "\t" + a;
        }
        out += "\n";
    }
    return out;
}

ThreatEnv::ThreatEnv(std::shared_ptr<TreeStore> store, Timestamp now, std::set<std::string> actors)
    : store_(std::move(store)), now_(now), actors_(std::move(actors))
{
    RootConfig cfg;
    cfg.roots.emplace(kRoot, RootEntry{store_->snapshot()->apex(), store_});
    cfg.default_root = kRoot;
    resolver_ = std::make_unique<Resolver>(std::move(cfg));
}

ThreatEnv ThreatEnv::sample(bool enforce)
{
    const Timestamp t0 = 1'000'000'000;
    TreeConfig cfg;
    cfg.enforce_auth = enforce;
    EnumTree tree(cfg);
    auto victim = E164Number::from_digits(kVictimDigits);

    tree.add_provider("ITU", "t2-a", ProvisioningMode::OptIn, t0);
    tree.authorize_country("ITU", "1", "t1-us", t0);
    tree.assign_number("CARRIER-X", victim, Assignment{"ACME", "carrier-x"}, t0);
    tree.delegate_number("t1-us", "1", victim, "t2-a", t0);

    RecordSet rs{to_domain(victim, tree.apex()), kDefaultTtlSeconds,
                 {parse_record_line(sip_rule(kAcmeSip)),
                  parse_record_line("IN NAPTR 100 10 \"u\" \"E2U+tel\" \"!^.*$!tel:+18005550100!\" .")}};
    AuthEvidence ev{AuthMethod::CallbackCompleted, "ok", victim, "ACME"};
    tree.register_number("ACME", "t2-a", victim, Registrant{"ACME", "ACME Corp", {}, "carrier-x"}, ev, rs, t0);

    return ThreatEnv(std::make_shared<TreeStore>(std::move(tree)), t0 + 60, {"ACME", "BETA", "CHARLIE"});
}

std::vector<std::uint64_t> detect_unauthorized(const std::vector<AuditEntry>& audit)
{
    std::map<E164Number, std::string> holder;
    std::vector<std::uint64_t> flagged;
    for (const auto& e : audit) {
        if (!e.number) {
            continue;
        }
        if (e.action == "register" || e.action == "dispute-upheld") {
            if (auto r = detail_field(e.detail, "registrant")) {
                holder[*e.number] = *r;
            }
        } else if (e.action == "update" || e.action == "opt-out") {
            auto it = holder.find(*e.number);
            if (it == holder.end() || it->second != e.actor) {
                flagged.push_back(e.seq);
            }
        }
    }
    return flagged;
}

Scenario default_scenario(ScenarioKind kind, const E164Number& victim, const std::string& attacker)
{
    Scenario sc{kind, victim, attacker, kBetaSip, {}};
    const std::string caller = "CHARLIE";
    const std::string past_ttl = std::to_string(kDefaultTtlSeconds + 1);
    unsigned no = 0;
    auto step = [&](std::string actor, std::string action, std::vector<std::string> args) {
        sc.steps.push_back(ScriptStep{++no, std::move(actor), std::move(action), std::move(args)});
    };
    step(caller, "resolve", {victim.digits()});
    switch (kind) {
    case ScenarioKind::Hijack:
        step(attacker, "update", {victim.digits(), sip_rule(kBetaSip)});
        break;
    case ScenarioKind::Eavesdrop:
        sc.attacker_contact = kBetaRelay;
        step(attacker, "relay", {kBetaRelay, kAcmeSip});
        step(attacker, "update", {victim.digits(), sip_rule(kBetaRelay)});
        break;
    case ScenarioKind::DenialOfService:
        sc.attacker_contact.clear();
        step(attacker, "update", {victim.digits(), sip_rule("sip:void.invalid", "^$")});
        break;
    }
    step(caller, "advance", {past_ttl});
    step(caller, "resolve", {victim.digits()});
    return sc;
}

ScenarioReport run_scenario(ThreatEnv& env, const Scenario& scenario)
{
    ScenarioReport report;
    report.kind = scenario.kind;
    report.enforcement = env.store().snapshot()->config().enforce_auth;

    const auto first_seq = env.store().snapshot()->next_seq();
    bool resolved_once = false;

    for (const auto& step : scenario.steps) {
        if (!env.actors().count(step.actor)) {
            fail(Errc::InvalidArgument, "step " + std::to_string(step.no) + " names unknown actor " + step.actor);
        }
        auto number_arg = [&]() {
            auto n = step.args.empty() ? scenario.victim : E164Number::from_digits(step.args.front());
            if (n != scenario.victim) {
                fail(Errc::InvalidArgument, "step " + std::to_string(step.no) + " names unseeded number " + n.digits());
            }
            return n;
        };

        if (step.action == "resolve") {
            std::vector<std::string> contacts;
            try {
                contacts = render(env.resolver().resolve(number_arg(), ThreatEnv::kRoot, std::nullopt, env.now()).contacts);
            } catch (const Error& e) {
                if (e.code() != Errc::NxDomain && e.code() != Errc::NoApplicableRecords) {
                    throw;
                }
            }
            (resolved_once ? report.after : report.before) = std::move(contacts);
            resolved_once = true;
        } else if (step.action == "update") {
            auto n = number_arg();
            auto snap = env.store().snapshot();
            RecordSet rs{to_domain(n, snap->apex()), kDefaultTtlSeconds, {}};
            for (std::size_t i = 1; i < step.args.size(); ++i) {
                rs.records.push_back(parse_record_line(step.args[i]));
            }
            try {
                env.store().mutate([&](EnumTree& t) { return t.update_records(step.actor, n, rs, env.now()); });
            } catch (const Error& e) {
                if (e.code() != Errc::AuthFailed) {
                    throw;
                }
                report.blocked.push_back(env.store().snapshot()->next_seq() - 1);
            }
        } else if (step.action == "relay") {
            if (step.args.size() != 2) {
                fail(Errc::InvalidArgument, "relay needs <relay-uri> <target-uri>");
            }
            env.relays[step.args[0]] = step.args[1];
        } else if (step.action == "unrelay") {
            if (step.args.size() != 1) {
                fail(Errc::InvalidArgument, "unrelay needs <relay-uri>");
            }
            env.relays.erase(step.args[0]);
        } else if (step.action == "advance") {
            Timestamp secs = 0;
            const auto& a = step.args.empty() ? std::string() : step.args.front();
            auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), secs);
            if (a.empty() || ec != std::errc{} || p != a.data() + a.size() || secs < 0) {
                fail(Errc::InvalidArgument, "advance needs a non-negative number of seconds");
            }
            env.advance(secs);
        } else {
            fail(Errc::InvalidArgument, "unknown script action '" + step.action + "'");
        }
    }

    for (auto seq : detect_unauthorized(env.store().snapshot()->audit())) {
        if (seq >= first_seq) {
            report.evidence.push_back(seq);
        }
    }
    report.detected = !report.evidence.empty();

    bool effect = false;
    switch (scenario.kind) {
    case ScenarioKind::Hijack:
        effect = !report.after.empty() && report.after.front() == scenario.attacker_contact;
        break;
    case ScenarioKind::Eavesdrop: {
        effect = !report.after.empty() && report.after.front() == scenario.attacker_contact;
        auto relay = env.relays.find(scenario.attacker_contact);
        report.end_to_end_reachable =
            effect && relay != env.relays.end() && !report.before.empty() && relay->second == report.before.front();
        break;
    }
    case ScenarioKind::DenialOfService:
        effect = !report.before.empty() && report.after.empty();
        break;
    }
    report.attack_succeeded = effect && report.detected;
    return report;
}

ScenarioReport run_hijack(ThreatEnv& env, const E164Number& victim, const std::string& attacker)
{
    return run_scenario(env, default_scenario(ScenarioKind::Hijack, victim, attacker));
}

ScenarioReport run_eavesdrop(ThreatEnv& env, const E164Number& victim, const std::string& attacker)
{
    return run_scenario(env, default_scenario(ScenarioKind::Eavesdrop, victim, attacker));
}

ScenarioReport run_dos(ThreatEnv& env, const E164Number& victim, const std::string& attacker)
{
    return run_scenario(env, default_scenario(ScenarioKind::DenialOfService, victim, attacker));
}

std::string format_report_text(const ScenarioReport& r)
{
    std::ostringstream out;
    out << "scenario: " << to_string(r.kind) << "\n"
        << "enforcement: " << (r.enforcement ? "on" : "off") << "\n"
        << "attack succeeded: " << (r.attack_succeeded ? "yes" : "no") << "\n"
        << "detected: " << (r.detected ? "yes" : "no") << "\n";
    if (!r.evidence.empty()) {
        out << "unauthorized mutations (audit seq): " << join(r.evidence) << "\n";
    }
    if (!r.blocked.empty()) {
        out << "refused attempts (audit seq): " << join(r.blocked) << "\n";
    }
    out << "before: " << (r.before.empty() ? "(no contacts)" : join(r.before, ", ")) << "\n"
        << "after: " << (r.after.empty() ? "(no contacts)" : join(r.after, ", ")) << "\n";
    if (r.kind == ScenarioKind::Eavesdrop) {
        out << "relay reaches original: " << (r.end_to_end_reachable ? "yes" : "no") << "\n";
    }
    return out.str();
}

std::string format_report_tsv(const ScenarioReport& r)
{
    std::ostringstream out;
    out << "scenario\t" << to_string(r.kind) << "\n"
        << "enforcement\t" << (r.enforcement ? "on" : "off") << "\n"
        << "attack_succeeded\t" << (r.attack_succeeded ? "true" : "false") << "\n"
        << "detected\t" << (r.detected ? "true" : "false") << "\n"
        << "evidence\t" << join(r.evidence) << "\n"
        << "blocked\t" << join(r.blocked) << "\n"
        << "before\t" << join(r.before, ",") << "\n"
        << "after\t" << join(r.after, ",") << "\n"
        << "end_to_end_reachable\t" << (r.end_to_end_reachable ? "true" : "false") << "\n";
    return out.str();
}

} // namespace enumkit::threat
