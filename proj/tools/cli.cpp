#include "cli.hpp"

#include "enumkit/dns_wire.hpp"
#include "enumkit/error.hpp"
#include "enumkit/resolver.hpp"
#include "enumkit/state.hpp"
#include "enumkit/threat.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace enumkit::cli {

namespace {

int exit_code_for(Errc c)
{
    switch (c) {
    case Errc::NxDomain:
    case Errc::NoApplicableRecords:
        return kExitNotFound;
    case Errc::AuthFailed:
        return kExitAuth;
    case Errc::Timeout:
    case Errc::IdMismatchExhausted:
        return kExitTimeout;
    case Errc::UnclassifiableInput:
    case Errc::NotANumber:
    case Errc::TooLong:
    case Errc::EmptyNumber:
    case Errc::MalformedDomain:
    case Errc::ApexMismatch:
    case Errc::SyntaxError:
    case Errc::RangeError:
    case Errc::UnsupportedFlag:
    case Errc::MalformedService:
    case Errc::BadPattern:
    case Errc::BadBackReference:
    case Errc::InvalidCountryCode:
    case Errc::UnknownRootId:
    case Errc::NameTooLong:
    case Errc::ConfigError:
    case Errc::IoError:
    case Errc::UnknownScenario:
    case Errc::InvalidArgument:
        return kExitUsage;
    default:
        return kExitConflict;
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::IoError, "cannot read " + path);
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) {
        fail(Errc::IoError, "cannot write " + path);
    }
}

/// Registry-side number: full E.164 digits, '+' optional.
E164Number registry_number(const std::string& text)
{
    return normalize(text.starts_with('+') ? text : "+" + text);
}

struct Globals {
    std::string state_dir;
    bool seed_sample = false;
    std::string now;
};

class Session {
public:
    explicit Session(const Globals& g) : g_(g)
    {
        state_ = g.seed_sample ? sample_state() : load_state(g.state_dir);
        now_ = g.now.empty() ? state_.clock : parse_iso8601(g.now);
    }

    SimState& state() { return state_; }
    Timestamp now() const { return now_; }
    bool persistent() const { return !g_.seed_sample; }

    RootId root_id(const std::optional<RootId>& root, const std::string& apex = {}) const
    {
        if (!apex.empty()) {
            for (const auto& [id, r] : state_.roots) {
                if (iequals(r.apex, apex)) {
                    return id;
                }
            }
            fail(Errc::ConfigError, "no root with apex " + apex);
        }
        auto id = root.value_or(state_.default_root);
        if (!state_.roots.count(id)) {
            fail(Errc::UnknownRootId, "root " + std::to_string(id) + " is not configured");
        }
        return id;
    }

    TreeStore& tree(RootId id)
    {
        auto& r = state_.roots.at(id);
        if (!r.tree) {
            fail(Errc::ConfigError, "root " + std::to_string(id) + " is remote; it has no local tree");
        }
        return *r.tree;
    }

    void save()
    {
        if (!persistent()) {
            return;
        }
        if (!g_.now.empty() && now_ > state_.clock) {
            state_.clock = now_;
        }
        save_state(state_, g_.state_dir);
    }

private:
    Globals g_;
    SimState state_;
    Timestamp now_ = 0;
};

std::string service_of(const ContactUri& c)
{
    return c.source_service.empty() ? c.scheme : c.source_service;
}

void print_contacts(std::ostream& out, const std::vector<ContactUri>& contacts, bool tsv,
                    const std::optional<RootId>& root = std::nullopt)
{
    std::size_t rank = 0;
    for (const auto& c : contacts) {
        ++rank;
        if (tsv) {
            if (root) {
                out << *root << '\t';
            }
            out << rank << '\t' << service_of(c) << '\t' << c.render() << '\n';
        } else {
            if (root) {
                out << "[root " << *root << "] ";
            }
            out << rank << ". " << service_of(c) << "  " << c.render() << '\n';
        }
    }
}

void print_trace(std::ostream& err, const ResolutionResult& r, bool verbose)
{
    if (!verbose) {
        return;
    }
    err << "root " << r.root_id << (r.from_cache ? " (cached)" : "") << "; zones queried:";
    for (const auto& z : r.queried_zones) {
        err << ' ' << z;
    }
    err << '\n';
}

// Subcommand option bags. Filled by CLI11, consumed after parsing.

struct ResolveOpts {
    std::string number;
    std::optional<RootId> root;
    std::string service;
    bool meta = false;
    std::string bookmark_store;
    std::string format = "human";
    bool verbose = false;
};

struct AdminOpts {
    std::string actor;
    std::optional<RootId> root;
    std::string number, cc, provider, zone_file, evidence, registrant, name, mode, from, to, challenger, grounds,
        outcome, carrier, authority;
};

struct ZoneOpts {
    std::string apex;
    std::optional<RootId> root;
    std::string file;
};

struct DigOpts {
    std::string target;
    std::string server;
    std::string apex = "e164.arpa";
    int timeout_ms = 1000;
    unsigned retries = 2;
};

struct AttackOpts {
    std::string kind;
    std::string enforce = "on";
    std::string format = "human";
};

int cmd_init(const Globals& g, bool seed, std::ostream& out)
{
    SimState s;
    if (seed) {
        s = sample_state();
    } else {
        s.roots.emplace(1, RootState{"e164.arpa", std::nullopt, std::make_shared<TreeStore>(EnumTree{})});
        s.clock = g.now.empty() ? kSampleEpoch : parse_iso8601(g.now);
    }
    save_state(s, g.state_dir);
    out << "initialized " << g.state_dir << (seed ? " with the sample deployment" : "") << '\n';
    return kExitOk;
}

int cmd_resolve(Session& session, const ResolveOpts& o, std::ostream& out, std::ostream& err)
{
    bool tsv = o.format == "tsv";
    std::optional<std::string> service;
    if (!o.service.empty()) {
        service = o.service;
    }
    auto& st = session.state();
    Resolver resolver(st.root_config());

    if (o.meta || o.root || !o.bookmark_store.empty()) {
        auto cls = classify_dial_string(DialString{o.number}, st.access_codes, st.dialing_context);
        if (std::holds_alternative<AccessCode>(cls)) {
            out << "BYPASS\t" << std::get<AccessCode>(cls).code << '\n';
            return kExitOk;
        }
        auto n = std::holds_alternative<ExtensionTagged>(cls) ? std::get<ExtensionTagged>(cls).number
                                                              : std::get<E164Number>(cls);
        if (o.meta) {
            auto hits = resolver.metasearch(n, service, session.now());
            if (hits.empty()) {
                err << "error: NxDomain: no configured root knows " << n.digits() << '\n';
                return kExitNotFound;
            }
            for (const auto& h : hits) {
                print_trace(err, h, o.verbose);
                print_contacts(out, h.contacts, tsv, h.root_id);
            }
            return kExitOk;
        }
        if (!o.bookmark_store.empty()) {
            BookmarkStore store;
            std::error_code ec;
            if (std::filesystem::exists(o.bookmark_store, ec)) {
                store = BookmarkStore::parse(read_file(o.bookmark_store));
            }
            struct Flush {
                BookmarkStore& s;
                const std::string& path;
                ~Flush() { try { write_file(path, s.serialize()); } catch (...) {} }
            } flush{store, o.bookmark_store};
            auto r = resolver.bookmark_and_resolve(n, store, service, session.now());
            print_trace(err, r, o.verbose);
            print_contacts(out, r.contacts, tsv);
            return kExitOk;
        }
        auto r = resolver.resolve(n, session.root_id(o.root), service, session.now());
        print_trace(err, r, o.verbose);
        print_contacts(out, r.contacts, tsv);
        return kExitOk;
    }

    auto outcome = resolver.resolve_dial(DialString{o.number}, service, session.now());
    if (const auto* bypass = std::get_if<Bypass>(&outcome)) {
        out << "BYPASS\t" << bypass->access_code << '\n';
        return kExitOk;
    }
    const auto& r = std::get<ResolutionResult>(outcome);
    print_trace(err, r, o.verbose);
    print_contacts(out, r.contacts, tsv);
    return kExitOk;
}

RecordSet load_record_set(const std::string& path, const EnumTree& tree, const E164Number& n)
{
    auto sets = parse_zone(read_file(path), tree.apex());
    auto owner = to_domain(n, tree.apex());
    if (sets.size() != 1 || !(sets.front().owner == owner)) {
        fail(Errc::InvalidArgument, path + " must hold exactly one record set, owned by " + owner.to_string());
    }
    return std::move(sets.front());
}

AuthEvidence parse_evidence(const std::string& text, const E164Number& n, const std::string& registrant)
{
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        fail(Errc::InvalidArgument, "evidence must look like method:payload");
    }
    return AuthEvidence{parse_auth_method(text.substr(0, colon)), text.substr(colon + 1), n, registrant};
}

void require(const std::string& value, const char* flag)
{
    if (value.empty()) {
        fail(Errc::InvalidArgument, std::string("missing ") + flag);
    }
}

int cmd_admin(Session& session, const std::string& verb, const AdminOpts& o, std::ostream& out)
{
    auto& store = session.tree(session.root_id(o.root));
    const auto now = session.now();
    auto actor = o.actor;
    auto number = [&] {
        require(o.number, "--number");
        return registry_number(o.number);
    };

    if (actor.empty() && verb != "register" && verb != "update") {
        actor = "operator";
    }

    std::uint64_t seq = 0;
    if (verb == "add-provider") {
        require(o.provider, "--provider");
        auto mode = o.mode.empty() ? ProvisioningMode::OptIn : parse_provisioning_mode(o.mode);
        seq = store.mutate([&](EnumTree& t) { return t.add_provider(actor, o.provider, mode, now); });
    } else if (verb == "add-authority") {
        require(o.authority, "--authority");
        seq = store.mutate([&](EnumTree& t) { return t.add_enrolling_authority(actor, o.authority, now); });
    } else if (verb == "assign") {
        auto n = number();
        require(o.registrant, "--registrant");
        require(o.carrier, "--carrier");
        seq = store.mutate([&](EnumTree& t) { return t.assign_number(actor, n, {o.registrant, o.carrier}, now); });
    } else if (verb == "authorize-cc") {
        require(o.cc, "--cc");
        require(o.provider, "--provider");
        seq = store.mutate([&](EnumTree& t) { return t.authorize_country(actor, o.cc, o.provider, now); });
    } else if (verb == "stage-cc") {
        require(o.cc, "--cc");
        require(o.provider, "--provider");
        seq = store.mutate([&](EnumTree& t) { return t.stage_national_zone(actor, o.cc, o.provider, now); });
    } else if (verb == "delegate") {
        auto n = number();
        require(o.provider, "--provider");
        auto snap = store.snapshot();
        auto cc = o.cc;
        if (cc.empty()) {
            auto found = snap->country_code_of(n);
            if (!found) {
                fail(Errc::UnknownCountry, "no national zone covers " + n.digits() + "; pass --cc");
            }
            cc = *found;
        }
        seq = store.mutate([&](EnumTree& t) { return t.delegate_number(actor, cc, n, o.provider, now); });
    } else if (verb == "register") {
        auto n = number();
        require(o.zone_file, "--zone-file");
        auto snap = store.snapshot();
        auto provider = o.provider.empty() ? snap->holder_of(n) : std::optional<std::string>(o.provider);
        if (!provider) {
            fail(Errc::NotDelegatedHere, "number " + n.digits() + " is not delegated to any provider");
        }
        auto registrant_id = o.registrant;
        if (registrant_id.empty()) {
            const auto* a = snap->oracle().find(n);
            registrant_id = a ? a->registrant_id : actor;
        }
        if (actor.empty()) {
            actor = registrant_id;
        }
        const auto* a = snap->oracle().find(n);
        Registrant reg{registrant_id, o.name.empty() ? registrant_id : o.name, {}, a ? a->carrier : ""};
        std::optional<AuthEvidence> ev;
        if (!o.evidence.empty()) {
            ev = parse_evidence(o.evidence, n, registrant_id);
        }
        auto rs = load_record_set(o.zone_file, *snap, n);
        seq = store.mutate([&](EnumTree& t) { return t.register_number(actor, *provider, n, reg, ev, rs, now); });
    } else if (verb == "update") {
        auto n = number();
        require(o.zone_file, "--zone-file");
        auto snap = store.snapshot();
        if (actor.empty()) {
            auto holding = snap->registration(n);
            actor = holding ? holding->registrant->id : "operator";
        }
        auto rs = load_record_set(o.zone_file, *snap, n);
        seq = store.mutate([&](EnumTree& t) { return t.update_records(actor, n, rs, now); });
    } else if (verb == "opt-out") {
        auto n = number();
        seq = store.mutate([&](EnumTree& t) { return t.opt_out(actor, n, now); });
    } else if (verb == "disconnect") {
        auto n = number();
        std::optional<Lifecycle> mode;
        if (!o.mode.empty()) {
            mode = parse_lifecycle(o.mode);
        }
        seq = store.mutate([&](EnumTree& t) { return t.disconnect_number(actor, n, now, mode); });
    } else if (verb == "port") {
        auto n = number();
        require(o.from, "--from");
        require(o.to, "--to");
        seq = store.mutate([&](EnumTree& t) { return t.port_number(actor, n, o.from, o.to, now); });
    } else if (verb == "dispute") {
        auto n = number();
        if (o.outcome.empty()) {
            require(o.challenger, "--challenger");
            auto d = store.mutate([&](EnumTree& t) { return t.file_dispute(o.challenger, n, o.grounds, now); });
            out << "dispute " << d.id << " open\n";
        } else {
            auto status = parse_dispute_status(o.outcome);
            auto d = store.mutate([&](EnumTree& t) { return t.resolve_dispute(actor, n, status, now); });
            out << "dispute " << d.id << ' ' << to_string(d.status) << '\n';
        }
        seq = store.snapshot()->next_seq() - 1;
    } else if (verb == "purge") {
        auto removed = store.mutate([&](EnumTree& t) { return t.purge_quarantine(actor, now); });
        out << "purged " << removed << '\n';
        seq = store.snapshot()->next_seq() - 1;
    } else {
        fail(Errc::InvalidArgument, "unknown admin action '" + verb + "'");
    }
    out << "audit seq " << seq << '\n';
    return kExitOk;
}

std::vector<RecordSet> exported_sets(const EnumTree& tree)
{
    std::map<EnumDomain, RecordSet> all;
    for (const auto& [_, zone] : tree.state().tier2) {
        for (const auto& [owner, rs] : zone.record_sets) {
            all.emplace(owner, rs);
        }
    }
    std::vector<RecordSet> out;
    for (auto& [_, rs] : all) {
        out.push_back(std::move(rs));
    }
    return out;
}

int cmd_zone(Session& session, const std::string& verb, const ZoneOpts& o, std::ostream& out)
{
    auto id = session.root_id(o.root, o.apex);
    auto& store = session.tree(id);
    if (verb == "export") {
        auto text = serialize_zone(exported_sets(*store.snapshot()));
        if (o.file.empty() || o.file == "-") {
            out << text;
        } else {
            write_file(o.file, text);
        }
        return kExitOk;
    }
    require(o.file, "FILE");
    auto sets = parse_zone(read_file(o.file), store.snapshot()->apex());
    std::size_t changed = 0;
    store.mutate([&](EnumTree& t) {
        for (const auto& rs : sets) {
            auto n = from_domain(rs.owner);
            auto holding = t.registration(n);
            if (holding && *holding->records == rs) {
                continue;
            }
            t.load_records("zone-import", rs, session.now());
            ++changed;
        }
    });
    out << "imported " << sets.size() << " record sets (" << changed << " changed)\n";
    return kExitOk;
}

bool looks_like_number(const std::string& s)
{
    return !s.empty() && s.find_first_not_of("+0123456789-(). ") == std::string::npos;
}

int cmd_dig(const Globals& g, const DigOpts& o, std::ostream& out)
{
    std::string domain = o.target;
    if (looks_like_number(o.target)) {
        std::optional<DialingContext> ctx;
        if (!o.target.starts_with('+')) {
            try {
                Session session(g);
                ctx = session.state().dialing_context;
            } catch (const Error&) {
            }
        }
        domain = to_domain(normalize(o.target, ctx), o.apex).to_string();
    }
    auto endpoint = dns::Endpoint::parse(o.server);
    auto query = dns::encode_query(domain, static_cast<std::uint16_t>(std::hash<std::string>{}(domain)));
    auto reply = dns::udp_exchange(endpoint, query, std::chrono::milliseconds(o.timeout_ms), o.retries);
    auto records = dns::naptr_answers(dns::decode_response(reply));
    if (records.empty()) {
        fail(Errc::NxDomain, domain + " has no NAPTR records");
    }
    out << "$ORIGIN " << domain << ".\n";
    for (const auto& r : records) {
        out << serialize_record(r) << '\n';
    }
    return kExitOk;
}

int cmd_attack(const AttackOpts& o, std::ostream& out)
{
    auto kind = threat::parse_scenario_kind(o.kind);
    if (o.enforce != "on" && o.enforce != "off") {
        fail(Errc::InvalidArgument, "--enforce takes on or off");
    }
    auto env = threat::ThreatEnv::sample(o.enforce == "on");
    auto report = threat::run_scenario(
        env, threat::default_scenario(kind, E164Number::from_digits("18005550100"), "BETA"));
    out << (o.format == "tsv" ? threat::format_report_tsv(report) : threat::format_report_text(report));
    return kExitOk;
}

int cmd_audit(Session& session, const std::optional<RootId>& root, std::ostream& out)
{
    for (const auto& e : session.tree(session.root_id(root)).snapshot()->audit()) {
        out << format_audit_line(e) << '\n';
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"ENUM resolution and registry simulator", "enumkit"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    if (const char* env = std::getenv("ENUMKIT_STATE")) {
        g.state_dir = env;
    }
    if (g.state_dir.empty()) {
        g.state_dir = "enumkit-state";
    }
    app.add_option("--state", g.state_dir, "State directory (default $ENUMKIT_STATE or ./enumkit-state)");
    app.add_flag("--seed-paper", g.seed_sample, "Use the built-in sample deployment instead of the state directory");
    app.add_option("--now", g.now, "Clock override, YYYY-MM-DDTHH:MM:SSZ");

    bool init_seed = false;
    auto* init = app.add_subcommand("init", "Create a state directory");
    init->add_flag("--seed-paper", init_seed, "Seed with the sample deployment");

    ResolveOpts ro;
    auto* resolve = app.add_subcommand("resolve", "Resolve a dialed number to contact URIs");
    resolve->add_option("number", ro.number, "Number, access code, or number#root")->required();
    resolve->add_option("--root", ro.root, "Resolve against this root id");
    resolve->add_option("--service", ro.service, "Only contacts for this service (e.g. sip)");
    resolve->add_flag("--meta", ro.meta, "Query every configured root");
    resolve->add_option("--bookmark-store", ro.bookmark_store, "Bookmark file; remembers which root answered");
    resolve->add_option("--format", ro.format)->check(CLI::IsMember({"human", "tsv"}));
    resolve->add_flag("-v,--verbose", ro.verbose, "Print the zones queried to stderr");

    AdminOpts ao;
    std::string admin_verb;
    auto* admin = app.add_subcommand("admin", "Mutate the simulated registry");
    admin->add_option("action", admin_verb,
                      "authorize-cc | stage-cc | delegate | register | update | disconnect | port | dispute | "
                      "opt-out | purge | assign | add-provider | add-authority")
        ->required();
    admin->add_option("--actor", ao.actor, "Who performs the action");
    admin->add_option("--root", ao.root);
    admin->add_option("--number", ao.number);
    admin->add_option("--cc", ao.cc);
    admin->add_option("--provider", ao.provider);
    admin->add_option("--zone-file", ao.zone_file);
    admin->add_option("--evidence", ao.evidence, "method:payload, e.g. callback:ok");
    admin->add_option("--registrant", ao.registrant);
    admin->add_option("--name", ao.name);
    admin->add_option("--mode", ao.mode, "coupled|decoupled for disconnect, optin|optout|mandated for add-provider");
    admin->add_option("--from", ao.from);
    admin->add_option("--to", ao.to);
    admin->add_option("--challenger", ao.challenger);
    admin->add_option("--grounds", ao.grounds);
    admin->add_option("--resolve", ao.outcome, "upheld|denied");
    admin->add_option("--carrier", ao.carrier);
    admin->add_option("--authority", ao.authority);

    ZoneOpts zo;
    std::string zone_verb;
    auto* zone = app.add_subcommand("zone", "Export or import master-file zone text");
    zone->add_option("action", zone_verb)->required()->check(CLI::IsMember({"export", "import"}));
    zone->add_option("file", zo.file, "Zone file (export defaults to stdout)");
    zone->add_option("--apex", zo.apex, "Select the root by apex");
    zone->add_option("--root", zo.root);

    DigOpts dgo;
    auto* dig = app.add_subcommand("dig", "Send a NAPTR query to a DNS server");
    dig->add_option("target", dgo.target, "Domain or number")->required();
    dig->add_option("--server", dgo.server, "host:port")->required();
    dig->add_option("--apex", dgo.apex, "Apex used when the target is a number");
    dig->add_option("--timeout", dgo.timeout_ms, "Per-attempt timeout in milliseconds");
    dig->add_option("--retries", dgo.retries);

    AttackOpts ato;
    auto* attack = app.add_subcommand("attack", "Run a scripted attack scenario");
    attack->add_option("scenario", ato.kind, "hijack | eavesdrop | dos")->required();
    attack->add_option("--enforce", ato.enforce, "on|off");
    attack->add_option("--format", ato.format)->check(CLI::IsMember({"human", "tsv"}));

    std::optional<RootId> audit_root;
    auto* audit = app.add_subcommand("audit", "Print the audit log");
    audit->add_option("--root", audit_root);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::optional<Session> session;
    bool mutating = admin->parsed() || (zone->parsed() && zone_verb == "import");
    try {
        if (init->parsed()) {
            return cmd_init(g, init_seed || g.seed_sample, out);
        }
        if (dig->parsed()) {
            return cmd_dig(g, dgo, out);
        }
        if (attack->parsed()) {
            return cmd_attack(ato, out);
        }
        session.emplace(g);
        int rc = kExitOk;
        if (resolve->parsed()) {
            rc = cmd_resolve(*session, ro, out, err);
        } else if (admin->parsed()) {
            rc = cmd_admin(*session, admin_verb, ao, out);
        } else if (zone->parsed()) {
            rc = cmd_zone(*session, zone_verb, zo, out);
        } else if (audit->parsed()) {
            rc = cmd_audit(*session, audit_root, out);
        }
        if (mutating) {
            session->save();
        }
        return rc;
    } catch (const Error& e) {
        if (mutating && session) {
            // refused attempts leave audit entries behind
            try {
                session->save();
            } catch (const Error&) {
            }
        }
        err << "error: " << errc_name(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConflict;
    }
}

} // namespace enumkit::cli
