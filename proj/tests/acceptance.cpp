// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "tree_builder.hpp"

#include "cli.hpp"
#include "enumkit/dns_wire.hpp"
#include "enumkit/error.hpp"
#include "enumkit/resolver.hpp"
#include "enumkit/state.hpp"
#include "enumkit/threat.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace enumkit;
namespace fs = std::filesystem;

namespace {

struct Failed {
    std::string why;
};

void require(bool ok, const std::string& why)
{
    if (!ok) {
        throw Failed{why};
    }
}

std::optional<Errc> error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

std::vector<std::string> uris(const std::vector<ContactUri>& v)
{
    std::vector<std::string> out;
    for (const auto& c : v) {
        out.push_back(c.render());
    }
    return out;
}

E164Number num(const std::string& d)
{
    return E164Number::from_digits(d);
}

std::string sip(const std::string& uri)
{
    return R"(IN NAPTR 10 10 "u" "E2U+sip" "!^.*$!)" + uri + R"(!" .)";
}

// One number registered under cc 1 of a fresh tree.
EnumTree one_number(const std::string& apex, const std::string& digits, const std::vector<std::string>& lines,
                    std::uint32_t ttl = 3600, Lifecycle lifecycle = Lifecycle::Coupled)
{
    EnumTree t(TreeConfig{apex, lifecycle, 30, true});
    auto n = num(digits);
    t.add_provider("itu", "t2", ProvisioningMode::OptIn, 0);
    t.authorize_country("itu", "1", "t1", 0);
    t.assign_number("c", n, {"R", "carrier-x"}, 0);
    t.delegate_number("t1", "1", n, "t2", 0);
    t.register_number("R", "t2", n, Registrant{"R", "R", {}, "carrier-x"},
                      AuthEvidence{AuthMethod::CallbackCompleted, "ok", n, "R"},
                      fixtures::record_set(lines, digits, apex, ttl), 0);
    return t;
}

RootConfig single_root(std::shared_ptr<TreeStore> store)
{
    RootConfig cfg;
    cfg.roots.emplace(1, RootEntry{store->snapshot()->apex(), store});
    cfg.default_root = 1;
    return cfg;
}

void golden_conversion()
{
    auto joe = normalize("+112025551212");
    require(to_domain(joe, "e164.foo").to_string() == "2.1.2.1.5.5.5.2.0.2.1.1.e164.foo", "e164.foo");
    require(to_domain(joe, "e164.arpa").to_string() == "2.1.2.1.5.5.5.2.0.2.1.1.e164.arpa", "e164.arpa");
    std::string block = "$ ORIGIN 2.1.2.1.5.5.5.2.0.2.1.1.E164.foo\n";
    for (const auto& l : fixtures::kSampleLines) {
        block += l + "\n";
    }
    auto sets = parse_zone(block, "e164.foo");
    require(sets.size() == 1 && sets[0].owner == to_domain(joe, "e164.foo") && sets[0].records.size() == 3,
            "sample block owner");
    std::mt19937 rng(1);
    for (int i = 0; i < 10000; ++i) {
        auto digits = fixtures::random_digits(rng, 1, 15);
        auto d = to_domain(num(digits), "e164.arpa");
        require(d.to_string() == fixtures::naive_domain(digits, "e164.arpa"), "naive oracle " + digits);
        require(from_domain(d.to_string(), "e164.arpa").digits() == digits, "round trip " + digits);
    }
}

void golden_resolution()
{
    auto sample = std::make_shared<TreeStore>(one_number("e164.foo", fixtures::kJoe, fixtures::kSampleLines));
    auto got = uris(Resolver(single_root(sample)).resolve(num(fixtures::kJoe), 1, std::nullopt, 0).contacts);
    require(got == std::vector<std::string>{"sip:johndoe@company.com", "tel:+112025551212"}, "sample set order");
    auto fixed = std::make_shared<TreeStore>(one_number("e164.foo", fixtures::kJoe, fixtures::kCorrectedLines));
    got = uris(Resolver(single_root(fixed)).resolve(num(fixtures::kJoe), 1, std::nullopt, 0).contacts);
    require(got == std::vector<std::string>{"sip:johndoe@company.com", "mailto:johndoe@company.com", "tel:+112025551212"},
            "corrected set order");
}

void oracle_equivalence()
{
    auto rt = fixtures::random_tree(2024, 1000);
    require(rt.flat.size() == 1000, "fixture size");
    auto store = std::make_shared<TreeStore>(std::move(rt.tree));
    Resolver r(single_root(store));
    r.set_caching(false);
    for (const auto& [n, rs] : rt.flat) {
        require(r.resolve(n, 1, std::nullopt, 0).contacts == select_services(rs, n.aus()), "registered " + n.digits());
    }
    std::mt19937 rng(77);
    for (int probes = 0; probes < 1000;) {
        auto cc = std::vector<std::string>{"1", "44", "358", "7", "86"}[rng() % 5];
        auto n = num(cc + fixtures::random_digits(rng, 6, 9));
        if (rt.flat.count(n)) {
            continue;
        }
        require(error_of([&] { r.resolve(n, 1, std::nullopt, 0); }) == Errc::NxDomain, "probe " + n.digits());
        ++probes;
    }
}

void authorization_gate()
{
    EnumTree t(TreeConfig{"e164.arpa"});
    t.add_provider("itu", "t2", ProvisioningMode::OptIn, 0);
    t.stage_national_zone("itu", "44", "t1-uk", 0);
    std::vector<E164Number> seeded;
    for (int i = 0; i < 50; ++i) {
        auto n = num("4420794" + std::to_string(61000 + i));
        t.assign_number("c", n, {"R", "c"}, 0);
        t.delegate_number("t1-uk", "44", n, "t2", 0);
        t.register_number("R", "t2", n, Registrant{"R", "R", {}, ""}, AuthEvidence{AuthMethod::CallbackCompleted, "ok", n, "R"},
                          fixtures::record_set({sip("sip:x@uk")}, n.digits(), "e164.arpa"), 0);
        seeded.push_back(n);
    }
    auto store = std::make_shared<TreeStore>(std::move(t));
    Resolver r(single_root(store));
    for (const auto& n : seeded) {
        require(error_of([&] { r.resolve(n, 1, std::nullopt, 0); }) == Errc::NxDomain, "before " + n.digits());
    }
    store->mutate([](EnumTree& tree) { return tree.authorize_country("itu", "44", "t1-uk", 0); });
    for (const auto& n : seeded) {
        require(uris(r.resolve(n, 1, std::nullopt, 0).contacts) == std::vector<std::string>{"sip:x@uk"},
                "after " + n.digits());
    }
}

void multi_root()
{
    RootConfig cfg;
    cfg.roots.emplace(36, RootEntry{"e164.r36", std::make_shared<TreeStore>(one_number("e164.r36", fixtures::kJoe, {sip("sip:joe@36")}))});
    cfg.roots.emplace(46, RootEntry{"e164.r46", std::make_shared<TreeStore>(one_number("e164.r46", fixtures::kJoe, {sip("sip:joe@46")}))});
    cfg.default_root = 46;
    cfg.dialing_context = DialingContext{"11202"};
    Resolver r(cfg);
    r.set_caching(false);

    auto routed = std::get<ResolutionResult>(r.resolve_dial(DialString{"5551212#36"}, std::nullopt, 0));
    require(routed.root_id == 36 && routed.roots_consulted == std::vector<RootId>{36}, "routing consulted only 36");
    for (const auto& z : routed.queried_zones) {
        require(z.ends_with(".e164.r36") || z == "e164.r36", "zone outside root 36: " + z);
    }

    auto as_set = [](const std::vector<ResolutionResult>& hits) {
        std::set<std::pair<RootId, std::vector<std::string>>> s;
        for (const auto& h : hits) {
            s.emplace(h.root_id, uris(h.contacts));
        }
        return s;
    };
    std::vector<RootId> fwd{36, 46}, rev{46, 36};
    auto a = as_set(r.metasearch(num(fixtures::kJoe), std::nullopt, 0, fwd));
    auto b = as_set(r.metasearch(num(fixtures::kJoe), std::nullopt, 0, rev));
    require(a == b, "metasearch depends on root order");
    decltype(a) expected{{36, {"sip:joe@36"}}, {46, {"sip:joe@46"}}};
    require(a == expected, "conflicting records not both returned");
}

void ttl_staleness()
{
    auto n = num(fixtures::kJoe);
    auto store = std::make_shared<TreeStore>(one_number("e164.foo", fixtures::kJoe, {sip("sip:old@x")}, 300));
    Resolver r(single_root(store));
    r.resolve(n, 1, std::nullopt, -10);
    store->mutate([&](EnumTree& t) {
        return t.update_records("R", n, fixtures::record_set({sip("sip:new@x")}, n.digits(), "e164.foo", 300), 0);
    });
    for (Timestamp t = 1; t < 290; ++t) {
        require(uris(r.resolve(n, 1, std::nullopt, t).contacts) == std::vector<std::string>{"sip:old@x"},
                "stale read at " + std::to_string(t));
    }
    require(uris(r.resolve(n, 1, std::nullopt, 300).contacts) == std::vector<std::string>{"sip:new@x"}, "read at 300");
}

void lifecycle()
{
    auto run = [](Lifecycle mode) {
        auto store = std::make_shared<TreeStore>(one_number("e164.foo", fixtures::kJoe, fixtures::kSampleLines, 3600, mode));
        Resolver r(single_root(store));
        r.set_caching(false);
        auto before = r.resolve(num(fixtures::kJoe), 1, std::nullopt, 0).contacts;
        store->mutate([](EnumTree& t) { return t.disconnect_number("carrier-x", num(fixtures::kJoe), 10); });
        std::optional<std::vector<ContactUri>> after;
        auto err = error_of([&] { after = r.resolve(num(fixtures::kJoe), 1, std::nullopt, 20).contacts; });
        return std::tuple{before, after, err};
    };
    auto [cb, ca, ce] = run(Lifecycle::Coupled);
    require(ce == Errc::NxDomain, "coupled disconnect still resolves");
    auto [db, da, de] = run(Lifecycle::Decoupled);
    require(!de && da == db, "decoupled disconnect changed resolution");

    auto store = std::make_shared<TreeStore>(one_number("e164.foo", fixtures::kJoe, fixtures::kSampleLines));
    auto records_before = store->snapshot()->state().tier2;
    store->mutate([](EnumTree& t) { return t.port_number("carrier-x", num(fixtures::kJoe), "carrier-x", "carrier-y", 5); });
    auto snap = store->snapshot();
    require(snap->oracle().find(num(fixtures::kJoe))->carrier == "carrier-y", "oracle carrier not moved");
    require(snap->registration(num(fixtures::kJoe))->registrant->carrier == "carrier-y", "registrant carrier not moved");
    for (const auto& [id, zone] : records_before) {
        require(snap->tier2(id)->record_sets == zone.record_sets, "port touched records in " + id);
    }
}

void threat_matrix()
{
    using namespace enumkit::threat;
    for (auto kind : {ScenarioKind::Hijack, ScenarioKind::Eavesdrop, ScenarioKind::DenialOfService}) {
        for (bool enforce : {true, false}) {
            auto env = ThreatEnv::sample(enforce);
            auto r = run_scenario(env, default_scenario(kind, num("18005550100"), "BETA"));
            auto label = std::string(to_string(kind)) + (enforce ? " on" : " off");
            if (enforce) {
                require(!r.attack_succeeded, label);
            } else {
                require(r.attack_succeeded && r.detected, label);
            }
        }
    }
}

void wire_codec()
{
    using namespace enumkit::dns;
    std::mt19937 rng(4242);
    std::vector<Bytes> corpus;
    for (int i = 0; i < 1000; ++i) {
        auto owner = to_domain(num(fixtures::random_digits(rng, 1, 15)), "e164.arpa");
        RecordSet rs{owner, static_cast<std::uint32_t>(rng() % 86400), {}};
        for (std::size_t k = 1 + rng() % 5; k > 0; --k) {
            rs.records.push_back(fixtures::random_record(rng, i));
        }
        auto parsed = parse_zone(serialize_zone({rs}), "e164.arpa").at(0);
        auto id = static_cast<std::uint16_t>(rng());
        DnsMessage m;
        m.header = Header{id, true, 0, true, false, true, false, kRcodeNoError};
        m.question = Question{owner.to_string()};
        for (const auto& rec : parsed.records) {
            m.answers.push_back(ResourceRecord{owner.to_string(), kTypeNaptr, kClassIn, parsed.ttl_seconds,
                                               WireNaptr::from_record(rec).encode()});
        }
        // uncapped: many generated sets exceed the 512-byte UDP limit
        auto wire = encode_message(m, 65535);
        auto decoded = decode_response(wire);
        require(decoded.header.id == id, "id");
        require(naptr_answers(decoded) == parsed.records, "records differ from master parse, message " + std::to_string(i));
        corpus.push_back(std::move(wire));
    }
    int foreign = 0;
    for (int i = 0; i < 10000; ++i) {
        Bytes b = corpus[rng() % corpus.size()];
        if (rng() % 3 == 0) {
            b.resize(rng() % b.size());
        } else {
            for (int k = 1 + rng() % 6; k > 0 && !b.empty(); --k) {
                b[rng() % b.size()] = static_cast<std::uint8_t>(rng());
            }
        }
        try {
            (void)naptr_answers(decode_response(b));
        } catch (const Error&) {
        } catch (...) {
            ++foreign;
        }
    }
    require(foreign == 0, std::to_string(foreign) + " mutated datagrams escaped as non-library errors");
}

int invoke(const std::vector<std::string>& args, std::string* out = nullptr)
{
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    if (out) {
        *out = o.str();
    }
    return code;
}

void cli_contract()
{
    auto dir = fs::temp_directory_path() / ("enumkit-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    struct Cleanup {
        fs::path p;
        ~Cleanup() { fs::remove_all(p); }
    } cleanup{dir};

    require(invoke({"--seed-paper", "resolve", "+112025551212"}) == 0, "exit 0");
    require(invoke({"--seed-paper", "resolve", "+19995550000"}) == 2, "exit 2");
    auto zf = dir / "beta.zone";
    std::ofstream(zf) << serialize_zone({fixtures::record_set({sip("sip:sales@beta.example")}, "18005550199", "e164.foo")});
    require(invoke({"--seed-paper", "admin", "register", "--number", "18005550199", "--zone-file", zf.string(),
                    "--evidence", "callback:ok", "--registrant", "MALLORY"}) == 3,
            "exit 3");
    require(invoke({"--seed-paper", "attack", "nosuch"}) == 4, "exit 4");
    std::string dead;
    {
        dns::UdpResponder silent([](std::span<const std::uint8_t>) { return std::vector<dns::Bytes>{}; });
        dead = silent.endpoint().to_string();
    }
    require(invoke({"dig", "+112025551212", "--server", dead, "--timeout", "50", "--retries", "1"}) == 5, "exit 5");

    auto state = (dir / "state").string();
    require(invoke({"--state", state, "init", "--seed-paper"}) == 0, "init");
    std::string first, second;
    require(invoke({"--state", state, "zone", "export"}, &first) == 0, "export");
    auto exported = dir / "export.zone";
    std::ofstream(exported) << first;
    require(invoke({"--state", state, "zone", "import", exported.string()}) == 0, "import");
    require(invoke({"--state", state, "zone", "export"}, &second) == 0, "second export");
    require(first == second && !first.empty(), "export/import/export differs");
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"golden conversion", golden_conversion},
        {"golden resolution", golden_resolution},
        {"oracle equivalence", oracle_equivalence},
        {"authorization gate", authorization_gate},
        {"multi-root", multi_root},
        {"ttl staleness", ttl_staleness},
        {"lifecycle", lifecycle},
        {"threat matrix", threat_matrix},
        {"wire codec", wire_codec},
        {"cli contract", cli_contract},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string why;
        try {
            criteria[i].second();
        } catch (const Failed& f) {
            why = f.why;
        } catch (const std::exception& e) {
            why = std::string("unexpected exception: ") + e.what();
        }
        std::cout << (why.empty() ? "PASS " : "FAIL ") << i + 1 << " " << criteria[i].first;
        if (!why.empty()) {
            std::cout << ": " << why;
            ++failures;
        }
        std::cout << "\n";
    }
    return failures == 0 ? 0 : 1;
}
