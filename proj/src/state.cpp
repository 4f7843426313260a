#include "enumkit/state.hpp"

#include "enumkit/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace enumkit {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto at = line.find(sep, pos);
        out.emplace_back(line.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos));
        if (at == std::string_view::npos) {
            return out;
        }
        pos = at + 1;
    }
}

[[noreturn]] void bad_file(const std::string& file, std::size_t line_no, const std::string& what)
{
    Error e(Errc::ConfigError, file + ":" + std::to_string(line_no) + ": " + what);
    e.line = line_no;
    throw e;
}

template <class F>
void each_row(const StateFiles& files, const std::string& name, std::size_t want, F&& f)
{
    auto it = files.find(name);
    if (it == files.end()) {
        return;
    }
    std::istringstream in(it->second);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split(line, '\t');
        if (want && fields.size() != want) {
            bad_file(name, line_no, "expected " + std::to_string(want) + " fields");
        }
        try {
            f(fields, line_no);
        } catch (const Error& e) {
            if (e.line) {
                throw;
            }
            bad_file(name, line_no, e.what());
        }
    }
}

std::map<std::string, std::string> parse_conf(const StateFiles& files, const std::string& name)
{
    std::map<std::string, std::string> out;
    auto it = files.find(name);
    if (it == files.end()) {
        return out;
    }
    std::istringstream in(it->second);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad_file(name, line_no, "expected key=value");
        }
        out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

template <class Int>
Int to_int(const std::string& s)
{
    Int v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
        fail(Errc::ConfigError, "bad integer '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s)
{
    if (s == "1") return true;
    if (s == "0") return false;
    fail(Errc::ConfigError, "bad flag '" + s + "' (want 0 or 1)");
}

std::string opt_time(const std::optional<Timestamp>& t)
{
    return t ? format_iso8601(*t) : "-";
}

std::optional<Timestamp> parse_opt_time(const std::string& s)
{
    if (s == "-") return std::nullopt;
    return parse_iso8601(s);
}

std::string_view to_string(SubscriptionState::Kind k)
{
    switch (k) {
    case SubscriptionState::Kind::Active: return "active";
    case SubscriptionState::Kind::Ported: return "ported";
    case SubscriptionState::Kind::Disconnected: return "disconnected";
    }
    return "?";
}

SubscriptionState::Kind parse_subscription_kind(const std::string& s)
{
    if (s == "active") return SubscriptionState::Kind::Active;
    if (s == "ported") return SubscriptionState::Kind::Ported;
    if (s == "disconnected") return SubscriptionState::Kind::Disconnected;
    fail(Errc::ConfigError, "bad subscription state '" + s + "'");
}

std::string lines_of(const std::set<std::string>& items)
{
    std::string out;
    for (const auto& i : items) {
        out += i + "\n";
    }
    return out;
}

std::set<std::string> parse_lines(const StateFiles& files, const std::string& name)
{
    std::set<std::string> out;
    each_row(files, name, 1, [&](const auto& f, std::size_t) { out.insert(f[0]); });
    return out;
}

const std::string kArchiveMarker = ";archived\t";

} // namespace

RootConfig SimState::root_config() const
{
    RootConfig cfg;
    for (const auto& [id, r] : roots) {
        if (r.remote) {
            cfg.roots.emplace(id, RootEntry{r.apex, RemoteRoot{*r.remote}});
        } else {
            cfg.roots.emplace(id, RootEntry{r.apex, r.tree});
        }
    }
    cfg.default_root = default_root;
    cfg.access_codes = access_codes;
    cfg.dialing_context = dialing_context;
    return cfg;
}

StateFiles render_tree(const TreeState& s)
{
    StateFiles out;
    out["tree.conf"] = "apex=" + s.config.apex + "\nlifecycle=" + std::string(to_string(s.config.lifecycle)) +
                       "\nquarantine_days=" + std::to_string(s.config.quarantine_days) +
                       "\nenforce_auth=" + (s.config.enforce_auth ? "1" : "0") + "\n";

    auto& t0 = out["tier0.tsv"];
    for (const auto& [cc, e] : s.tier0.entries) {
        t0 += cc + "\t" + (e.authorized ? "1" : "0") + "\t" + e.delegation.value_or("-") + "\n";
    }

    auto& t1 = out["tier1.tsv"];
    for (const auto& [cc, z] : s.tier1) {
        t1 += "zone\t" + cc + "\t" + z.provider_id + "\n";
        for (const auto& [n, p] : z.delegations) {
            t1 += "delegation\t" + cc + "\t" + n.digits() + "\t" + p + "\n";
        }
    }

    auto& providers = out["providers.tsv"];
    auto& registrants = out["registrants.tsv"];
    auto& custody = out["custody.tsv"];
    for (const auto& [id, z] : s.tier2) {
        providers += id + "\t" + std::string(to_string(z.mode)) + "\n";
        for (const auto& [n, r] : z.registrant_index) {
            registrants += id + "\t" + n.digits() + "\t" + r.id + "\t" + r.display_name + "\t" + r.carrier + "\t" +
                           std::string(to_string(r.state.kind)) + "\t" +
                           (r.state.to_carrier.empty() ? "-" : r.state.to_carrier) + "\t" +
                           format_iso8601(r.state.at) + "\n";
        }
        for (const auto& [n, c] : z.custody) {
            custody += id + "\t" + n.digits() + "\t" + (c.opt_out_enrolled ? "1" : "0") + "\t" +
                       opt_time(c.quarantine_until) + "\n";
        }
        std::vector<RecordSet> sets;
        for (const auto& [_, rs] : z.record_sets) {
            sets.push_back(rs);
        }
        out["zones/" + id + ".zone"] = serialize_zone(sets);
    }

    out["oracle.tsv"] = s.oracle.to_tsv();
    out["verifiers"] = lines_of(s.oracle.trusted_verifiers());
    out["authorities"] = lines_of(s.enrolling_authorities);

    auto& audit = out["audit.log"];
    for (const auto& e : s.audit) {
        audit += format_audit_line(e) + "\n";
    }

    auto& disputes = out["disputes.tsv"];
    for (const auto& d : s.disputes) {
        disputes += std::to_string(d.id) + "\t" + d.number.digits() + "\t" + d.challenger + "\t" + d.grounds + "\t" +
                    std::string(to_string(d.status)) + "\t" + format_iso8601(d.filed_at) + "\n";
    }

    auto& archive = out["archive.zone"];
    for (const auto& a : s.archive) {
        archive += kArchiveMarker + a.number.digits() + "\t" + a.registrant_id + "\t" + format_iso8601(a.archived_at) +
                   "\t" + a.reason + "\n" + serialize_zone({a.records});
    }
    return out;
}

TreeState parse_tree(const StateFiles& files, const std::string& prefix)
{
    auto name = [&](const std::string& n) { return prefix + n; };
    TreeState s;

    auto conf = parse_conf(files, name("tree.conf"));
    if (!conf.count("apex")) {
        fail(Errc::ConfigError, name("tree.conf") + ": missing apex");
    }
    s.config.apex = conf["apex"];
    try {
        if (conf.count("lifecycle")) s.config.lifecycle = parse_lifecycle(conf["lifecycle"]);
        if (conf.count("quarantine_days")) s.config.quarantine_days = to_int<int>(conf["quarantine_days"]);
        if (conf.count("enforce_auth")) s.config.enforce_auth = to_bool(conf["enforce_auth"]);
    } catch (const Error& e) {
        fail(Errc::ConfigError, name("tree.conf") + ": " + e.what());
    }
    s.tier0.apex = s.config.apex;

    each_row(files, name("tier0.tsv"), 3, [&](const auto& f, std::size_t) {
        Tier0Entry e{to_bool(f[1]), f[2] == "-" ? std::nullopt : std::optional<std::string>(f[2])};
        s.tier0.entries.emplace(f[0], std::move(e));
    });

    each_row(files, name("tier1.tsv"), 0, [&](const auto& f, std::size_t) {
        if (f[0] == "zone" && f.size() == 3) {
            s.tier1[f[1]] = Tier1Zone{f[1], f[2], {}};
        } else if (f[0] == "delegation" && f.size() == 4) {
            auto it = s.tier1.find(f[1]);
            if (it == s.tier1.end()) {
                fail(Errc::ConfigError, "delegation under undeclared zone " + f[1]);
            }
            it->second.delegations.emplace(E164Number::from_digits(f[2]), f[3]);
        } else {
            fail(Errc::ConfigError, "expected a zone or delegation row");
        }
    });

    each_row(files, name("providers.tsv"), 2, [&](const auto& f, std::size_t) {
        Tier2Zone z;
        z.provider_id = f[0];
        z.mode = parse_provisioning_mode(f[1]);
        auto zone_file = files.find(name("zones/" + f[0] + ".zone"));
        if (zone_file != files.end()) {
            for (auto& rs : parse_zone(zone_file->second, s.config.apex)) {
                auto owner = rs.owner;
                z.record_sets.emplace(std::move(owner), std::move(rs));
            }
        }
        s.tier2.emplace(f[0], std::move(z));
    });

    auto zone_of = [&](const std::string& id) -> Tier2Zone& {
        auto it = s.tier2.find(id);
        if (it == s.tier2.end()) {
            fail(Errc::ConfigError, "unknown provider " + id);
        }
        return it->second;
    };

    each_row(files, name("registrants.tsv"), 8, [&](const auto& f, std::size_t) {
        Registrant r{f[2], f[3], {parse_subscription_kind(f[5]), f[6] == "-" ? "" : f[6], parse_iso8601(f[7])}, f[4]};
        zone_of(f[0]).registrant_index.emplace(E164Number::from_digits(f[1]), std::move(r));
    });
    each_row(files, name("custody.tsv"), 4, [&](const auto& f, std::size_t) {
        zone_of(f[0]).custody.emplace(E164Number::from_digits(f[1]), Custody{to_bool(f[2]), parse_opt_time(f[3])});
    });

    if (auto it = files.find(name("oracle.tsv")); it != files.end()) {
        s.oracle = AssignmentOracle::parse_tsv(it->second);
    }
    for (const auto& v : parse_lines(files, name("verifiers"))) {
        s.oracle.trust_verifier(v);
    }
    s.enrolling_authorities = parse_lines(files, name("authorities"));

    each_row(files, name("audit.log"), 0, [&](const auto& f, std::size_t) {
        std::string line;
        for (std::size_t i = 0; i < f.size(); ++i) {
            line += (i ? "\t" : "") + f[i];
        }
        s.audit.push_back(parse_audit_line(line));
    });

    each_row(files, name("disputes.tsv"), 6, [&](const auto& f, std::size_t) {
        s.disputes.push_back(DisputeChallenge{to_int<std::uint64_t>(f[0]), E164Number::from_digits(f[1]), f[2], f[3],
                                              parse_dispute_status(f[4]), parse_iso8601(f[5])});
    });

    if (auto it = files.find(name("archive.zone")); it != files.end()) {
        const auto& text = it->second;
        std::size_t pos = 0;
        while (pos < text.size()) {
            if (text.compare(pos, kArchiveMarker.size(), kArchiveMarker) != 0) {
                fail(Errc::ConfigError, name("archive.zone") + ": expected an archive marker");
            }
            auto eol = text.find('\n', pos);
            auto header = split(std::string_view(text).substr(pos + kArchiveMarker.size(),
                                                              (eol == std::string::npos ? text.size() : eol) - pos -
                                                                  kArchiveMarker.size()),
                                '\t');
            if (header.size() != 4) {
                fail(Errc::ConfigError, name("archive.zone") + ": bad archive marker");
            }
            auto body_start = eol == std::string::npos ? text.size() : eol + 1;
            auto next = text.find("\n" + kArchiveMarker, body_start == 0 ? 0 : body_start - 1);
            auto body_end = next == std::string::npos ? text.size() : next + 1;
            auto sets = parse_zone(std::string_view(text).substr(body_start, body_end - body_start), s.config.apex);
            if (sets.size() != 1) {
                fail(Errc::ConfigError, name("archive.zone") + ": each archive entry holds one record set");
            }
            s.archive.push_back(ArchivedRecordSet{E164Number::from_digits(header[0]), header[1],
                                                  parse_iso8601(header[2]), header[3], std::move(sets.front())});
            pos = body_end;
        }
    }
    return s;
}

StateFiles render_state(const SimState& s)
{
    StateFiles out;
    std::string codes;
    for (std::size_t i = 0; i < s.access_codes.size(); ++i) {
        codes += (i ? "," : "") + s.access_codes[i];
    }
    out["settings.conf"] = "default_root=" + std::to_string(s.default_root) +
                           "\ndialing_context=" + (s.dialing_context ? s.dialing_context->prefix : "") +
                           "\naccess_codes=" + codes + "\nclock=" + format_iso8601(s.clock) + "\n";

    std::vector<RootLine> lines;
    for (const auto& [id, r] : s.roots) {
        lines.push_back(RootLine{id, r.apex, r.remote});
        if (r.tree) {
            for (auto& [path, body] : render_tree(r.tree->snapshot()->state())) {
                out["trees/" + std::to_string(id) + "/" + path] = std::move(body);
            }
        }
    }
    out["roots.tsv"] = format_root_registry(lines);
    out["bookmarks.tsv"] = s.bookmarks.serialize();
    return out;
}

SimState parse_state(const StateFiles& files)
{
    SimState s;
    auto conf = parse_conf(files, "settings.conf");
    try {
        if (conf.count("default_root")) s.default_root = to_int<RootId>(conf["default_root"]);
        if (conf.count("dialing_context") && !conf["dialing_context"].empty()) {
            s.dialing_context = DialingContext{conf["dialing_context"]};
        }
        if (conf.count("access_codes")) {
            s.access_codes.clear();
            if (!conf["access_codes"].empty()) {
                s.access_codes = split(conf["access_codes"], ',');
            }
        }
        if (conf.count("clock")) s.clock = parse_iso8601(conf["clock"]);
    } catch (const Error& e) {
        fail(Errc::ConfigError, std::string("settings.conf: ") + e.what());
    }

    auto roots = files.find("roots.tsv");
    if (roots == files.end()) {
        fail(Errc::ConfigError, "state has no roots.tsv");
    }
    for (auto& line : parse_root_registry(roots->second)) {
        RootState r{line.apex, line.remote, nullptr};
        if (!line.remote) {
            auto tree = EnumTree::from_state(parse_tree(files, "trees/" + std::to_string(line.id) + "/"));
            if (tree.apex() != line.apex) {
                fail(Errc::ConfigError, "root " + std::to_string(line.id) + " apex disagrees with its tree.conf");
            }
            r.tree = std::make_shared<TreeStore>(std::move(tree));
        }
        s.roots.emplace(line.id, std::move(r));
    }
    if (auto it = files.find("bookmarks.tsv"); it != files.end()) {
        s.bookmarks = BookmarkStore::parse(it->second);
    }
    return s;
}

StateFiles read_state_files(const fs::path& dir)
{
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        fail(Errc::IoError, "state directory " + dir.string() + " does not exist (run 'init')");
    }
    StateFiles out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) {
            fail(Errc::IoError, "cannot read " + entry.path().string());
        }
        std::ostringstream body;
        body << in.rdbuf();
        out[fs::relative(entry.path(), dir).generic_string()] = body.str();
    }
    return out;
}

SimState load_state(const fs::path& dir)
{
    return parse_state(read_state_files(dir));
}

void save_state(const SimState& s, const fs::path& dir)
{
    auto files = render_state(s);
    std::error_code ec;
    for (const auto& sub : {"trees", "settings.conf", "roots.tsv", "bookmarks.tsv"}) {
        fs::remove_all(dir / sub, ec);
    }
    for (const auto& [rel, body] : files) {
        auto path = dir / rel;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            fail(Errc::IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
        }
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << body;
        if (!out) {
            fail(Errc::IoError, "cannot write " + path.string());
        }
    }
}

namespace {

std::shared_ptr<TreeStore> seeded_root(const std::string& apex, const std::string& sip_uri)
{
    const Timestamp t = kSampleEpoch;
    EnumTree tree(TreeConfig{apex});
    auto joe = E164Number::from_digits("112025551212");
    tree.add_provider("ITU", "t2-a", ProvisioningMode::OptIn, t);
    tree.authorize_country("ITU", "1", "t1-us", t);
    tree.assign_number("carrier-x", joe, Assignment{"JOE", "carrier-x"}, t);
    tree.delegate_number("t1-us", "1", joe, "t2-a", t);
    RecordSet rs{to_domain(joe, apex), kDefaultTtlSeconds,
                 {parse_record_line("IN NAPTR 10 10 \"u\" \"sip+E2U\" \"!^.*$!" + sip_uri + "!\" .")}};
    tree.register_number("JOE", "t2-a", joe, Registrant{"JOE", "Joe", {}, "carrier-x"},
                         AuthEvidence{AuthMethod::CallbackCompleted, "ok", joe, "JOE"}, rs, t);
    return std::make_shared<TreeStore>(std::move(tree));
}

} // namespace

SimState sample_state()
{
    const Timestamp t = kSampleEpoch;
    const std::string apex = "e164.foo";
    EnumTree tree(TreeConfig{apex});

    auto joe = E164Number::from_digits("112025551212");
    auto acme = E164Number::from_digits("18005550100");
    auto beta = E164Number::from_digits("18005550199");
    auto charlie = E164Number::from_digits("12125550123");

    tree.add_provider("ITU", "t2-a", ProvisioningMode::OptIn, t);
    tree.add_provider("ITU", "t2-b", ProvisioningMode::OptOut, t);
    tree.add_enrolling_authority("ITU", "carrier-y", t);
    tree.trust_verifier("ITU", "verisign-test", t);
    tree.authorize_country("ITU", "1", "t1-us", t);
    // UK is staged but not authorized.
    tree.stage_national_zone("ITU", "44", "t1-uk", t);

    tree.assign_number("carrier-x", joe, Assignment{"JOE", "carrier-x"}, t);
    tree.assign_number("carrier-x", acme, Assignment{"ACME", "carrier-x"}, t);
    tree.assign_number("carrier-y", beta, Assignment{"BETA", "carrier-y"}, t);
    tree.assign_number("carrier-y", charlie, Assignment{"CHARLIE", "carrier-y"}, t);
    for (const auto& n : {joe, acme, beta}) {
        tree.delegate_number("t1-us", "1", n, "t2-a", t);
    }
    tree.delegate_number("t1-us", "1", charlie, "t2-b", t);

    RecordSet joe_rs{to_domain(joe, apex), kDefaultTtlSeconds,
                     {parse_record_line("IN NAPTR 102 10 \"u\" \"tel+E2U\" \"!^.*$!tel:+112025551212!\" ."),
                      parse_record_line("IN NAPTR 10 10 \"u\" \"sip+E2U\" \"!+(.*)!sip:johndoe@company.com!\" ."),
                      parse_record_line("IN NAPTR 100 10 \"u\" \"mailto+E2U\" \"!^$!mailto:johndoe@company.com!\" .")}};
    tree.register_number("JOE", "t2-a", joe, Registrant{"JOE", "Joe", {}, "carrier-x"},
                         AuthEvidence{AuthMethod::CallbackCompleted, "ok", joe, "JOE"}, joe_rs, t);

    RecordSet acme_rs{to_domain(acme, apex), kDefaultTtlSeconds,
                      {parse_record_line("IN NAPTR 10 10 \"u\" \"E2U+sip\" \"!^.*$!sip:callcenter@acme.example!\" ."),
                       parse_record_line("IN NAPTR 100 10 \"u\" \"E2U+tel\" \"!^.*$!tel:+18005550100!\" .")}};
    tree.register_number("ACME", "t2-a", acme, Registrant{"ACME", "ACME Corp", {}, "carrier-x"},
                         AuthEvidence{AuthMethod::LidbMatch, "carrier-x", acme, "ACME"}, acme_rs, t);

    RecordSet charlie_rs{to_domain(charlie, apex), kDefaultTtlSeconds,
                         {parse_record_line("IN NAPTR 10 10 \"u\" \"E2U+sip\" \"!^.*$!sip:charlie@carrier-y.example!\" .")}};
    tree.register_number("carrier-y", "t2-b", charlie, Registrant{"CHARLIE", "Charlie", {}, "carrier-y"},
                         std::nullopt, charlie_rs, t);

    SimState s;
    s.roots.emplace(1, RootState{apex, std::nullopt, std::make_shared<TreeStore>(std::move(tree))});
    s.roots.emplace(36, RootState{"e164.r36.example", std::nullopt,
                                  seeded_root("e164.r36.example", "sip:joe@r36.example")});
    s.roots.emplace(46, RootState{"e164.r46.example", std::nullopt,
                                  seeded_root("e164.r46.example", "sip:joe@r46.example")});
    s.default_root = 1;
    s.dialing_context = DialingContext{"11202"};
    s.clock = t + 3600;
    return s;
}

} // namespace enumkit
