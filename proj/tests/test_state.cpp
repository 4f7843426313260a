#include "tree_builder.hpp"

#include "enumkit/error.hpp"
#include "enumkit/state.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace enumkit;
namespace fs = std::filesystem;

namespace {

const E164Number kJoe = E164Number::from_digits(fixtures::kJoe);
const E164Number kAcme = E164Number::from_digits("18005550100");
const E164Number kCharlie = E164Number::from_digits("12125550123");

// The sample state plus quarantine, archive, disputes and a port.
SimState busy_state()
{
    auto s = sample_state();
    auto& store = *s.roots.at(1).tree;
    Timestamp t = kSampleEpoch + 7200;
    store.mutate([&](EnumTree& tree) { return tree.port_number("carrier-x", kAcme, "carrier-x", "carrier-y", t); });
    store.mutate([&](EnumTree& tree) { return tree.file_dispute("BETA", kAcme, "trademark", t + 1); });
    store.mutate([&](EnumTree& tree) { return tree.resolve_dispute("udrp", kAcme, DisputeStatus::Denied, t + 2); });
    store.mutate([&](EnumTree& tree) { return tree.file_dispute("BETA", kAcme, "second try", t + 3); });
    store.mutate([&](EnumTree& tree) { return tree.disconnect_number("carrier-x", kJoe, t + 5); });
    store.mutate([&](EnumTree& tree) {
        tree.purge_quarantine("operator", t + 5 + 31 * 86400);
        return tree.next_seq() - 1;
    });
    store.mutate([&](EnumTree& tree) { return tree.disconnect_number("carrier-y", kCharlie, t + 6 + 31 * 86400); });
    s.bookmarks.put(Bookmark{kJoe, 36, t});
    s.roots.emplace(7, RootState{"e164.remote.example", dns::Endpoint{"127.0.0.1", 5300}, nullptr});
    return s;
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("enumkit-state-" + std::to_string(::getpid()) + "-" +
                                            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST(State, BusyStateHasEveryKindOfData)
{
    auto s = busy_state();
    const auto& tree = *s.roots.at(1).tree->snapshot();
    EXPECT_FALSE(tree.archive().empty());
    EXPECT_EQ(tree.disputes().size(), 2u);
    bool quarantined = false;
    for (const auto& [id, zone] : tree.state().tier2) {
        for (const auto& [n, c] : zone.custody) {
            quarantined = quarantined || c.quarantine_until.has_value();
        }
    }
    EXPECT_TRUE(quarantined);
}

TEST(State, RenderParseIsLossless)
{
    auto s = busy_state();
    auto files = render_state(s);
    EXPECT_TRUE(files.count("trees/1/archive.zone"));
    EXPECT_TRUE(files.count("trees/1/disputes.tsv"));
    auto back = parse_state(files);
    ASSERT_EQ(back.roots.size(), s.roots.size());
    for (const auto& [id, root] : s.roots) {
        EXPECT_EQ(back.roots.at(id).apex, root.apex);
        EXPECT_EQ(back.roots.at(id).remote, root.remote);
        if (root.tree) {
            EXPECT_EQ(back.roots.at(id).tree->snapshot()->state(), root.tree->snapshot()->state()) << id;
        } else {
            EXPECT_EQ(back.roots.at(id).tree, nullptr);
        }
    }
    EXPECT_EQ(back.clock, s.clock);
    EXPECT_EQ(back.dialing_context->prefix, s.dialing_context->prefix);
    EXPECT_EQ(render_state(back), files);
}

TEST(State, RandomTreeRoundTrip)
{
    auto rt = fixtures::random_tree(3, 150);
    auto files = render_tree(rt.tree.state());
    EXPECT_EQ(parse_tree(files), rt.tree.state());
}

TEST(State, SaveLoadSaveIsByteIdentical)
{
    TempDir a, b;
    auto s = busy_state();
    save_state(s, a.path);
    save_state(load_state(a.path), b.path);
    auto fa = read_state_files(a.path);
    auto fb = read_state_files(b.path);
    EXPECT_FALSE(fa.empty());
    EXPECT_EQ(fa, fb);
    // saving over an existing directory does not leave stale trees behind
    s.roots.erase(46);
    save_state(s, a.path);
    EXPECT_FALSE(fs::exists(a.path / "trees" / "46"));
}

TEST(State, MalformedFilesAreConfigErrors)
{
    auto files = render_state(sample_state());
    auto bad = files;
    bad["roots.tsv"] = "one\te164.foo\tlocal\n";
    EXPECT_THROW(parse_state(bad), Error);
    bad = files;
    bad["trees/1/tier0.tsv"] += "1\tmaybe\tt1\n";
    EXPECT_THROW(parse_state(bad), Error);
    bad = files;
    bad.erase("trees/1/tree.conf");
    EXPECT_THROW(parse_state(bad), Error);
    try {
        load_state("/nonexistent/enumkit");
        FAIL();
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == Errc::IoError || e.code() == Errc::ConfigError);
    }
}

TEST(State, SampleStateResolves)
{
    auto s = sample_state();
    Resolver r(s.root_config());
    auto res = r.resolve(kJoe, 1, std::nullopt, s.clock);
    ASSERT_EQ(res.contacts.size(), 2u);
    EXPECT_EQ(res.contacts.front().render(), "sip:johndoe@company.com");
    EXPECT_EQ(r.metasearch(kJoe, std::nullopt, s.clock).size(), 3u);
}
