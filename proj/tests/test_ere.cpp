#include "enumkit/ere.hpp"
#include "enumkit/error.hpp"

#include <gtest/gtest.h>

#include <random>
#include <regex>

using enumkit::ere::PlusMode;
using enumkit::ere::Regex;

TEST(Ere, Basics)
{
    EXPECT_TRUE(Regex("^.*$").search("+112025551212"));
    EXPECT_TRUE(Regex("^$").search(""));
    EXPECT_FALSE(Regex("^$").search("+1"));
    auto m = Regex("(a|ab)(c|bcd)(d*)").search("abcd");
    ASSERT_TRUE(m);
    EXPECT_EQ(m->whole.begin, 0u);
    EXPECT_EQ(m->whole.end, 4u);
    EXPECT_EQ(m->groups.size(), 3u);
}

TEST(Ere, LeadingPlus)
{
    Regex lenient("+(.*)");
    auto m = lenient.search("+112025551212");
    ASSERT_TRUE(m);
    ASSERT_TRUE(m->groups[0]);
    EXPECT_EQ(m->groups[0]->begin, 1u);
    EXPECT_EQ(m->groups[0]->end, 13u);
    try {
        Regex strict("+(.*)", PlusMode::Strict);
        FAIL() << "strict mode accepted a dangling '+'";
    } catch (const enumkit::Error& e) {
        EXPECT_EQ(e.code(), enumkit::Errc::BadPattern);
    }
}

TEST(Ere, BadPatterns)
{
    for (const char* p : {"(", "a)", "[abc", "*a", "a||", "\\"}) {
        try {
            Regex r(p, PlusMode::Strict);
            if (std::string(p) != "a||") {
                ADD_FAILURE() << "accepted " << p;
            }
        } catch (const enumkit::Error& e) {
            EXPECT_EQ(e.code(), enumkit::Errc::BadPattern) << p;
        }
    }
}

TEST(Ere, EmptyLoopTerminates)
{
    EXPECT_TRUE(Regex("(a*)*b").search("aaaaaaaaaaaaaaaaaaaab"));
    EXPECT_FALSE(Regex("^(a*)*$").search("aaaaaaaaaaaaaaaac"));
}

// Random patterns over a tiny alphabet, compared with std::regex. Repeated
// groups are kept non-nullable because libstdc++ stops a loop early after an
// empty required iteration, which ECMAScript and this engine do not.
namespace {

struct Gen {
    std::string text;
    bool nullable = false;
};

Gen random_pattern(std::mt19937& rng, int depth = 0)
{
    Gen out{"", true};
    int atoms = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < atoms; ++i) {
        Gen atom{"", false};
        switch (rng() % (depth < 2 ? 7 : 5)) {
        case 0: atom.text = "a"; break;
        case 1: atom.text = "b"; break;
        case 2: atom.text = "."; break;
        case 3: atom.text = "[ab]"; break;
        case 4: atom.text = "[^a]"; break;
        case 5: {
            auto inner = random_pattern(rng, depth + 1);
            atom = {"(" + inner.text + ")", inner.nullable};
            break;
        }
        case 6: {
            auto l = random_pattern(rng, depth + 1);
            auto r = random_pattern(rng, depth + 1);
            atom = {"(" + l.text + "|" + r.text + ")", l.nullable || r.nullable};
            break;
        }
        }
        switch (atom.nullable ? 3 : rng() % 5) {
        case 0: atom.text += '*'; atom.nullable = true; break;
        case 1: atom.text += '+'; break;
        case 2: atom.text += '?'; atom.nullable = true; break;
        default: break;
        }
        out.text += atom.text;
        out.nullable = out.nullable && atom.nullable;
    }
    return out;
}

} // namespace

TEST(Ere, MatchesStdRegexOracle)
{
    std::mt19937 rng(1234);
    int compared = 0;
    for (int i = 0; i < 3000; ++i) {
        auto pattern = random_pattern(rng).text;
        if (rng() % 4 == 0) pattern = "^" + pattern;
        if (rng() % 4 == 0) pattern += "$";
        std::string subject;
        for (std::size_t k = rng() % 8; k > 0; --k) {
            subject += "abc"[rng() % 3];
        }
        std::regex oracle(pattern, std::regex::ECMAScript);
        std::smatch sm;
        bool expected = std::regex_search(subject, sm, oracle);
        auto got = Regex(pattern).search(subject);
        ASSERT_EQ(expected, got.has_value()) << pattern << " on '" << subject << "'";
        if (expected) {
            ASSERT_EQ(static_cast<std::size_t>(sm.position(0)), got->whole.begin) << pattern << " on " << subject;
            ASSERT_EQ(static_cast<std::size_t>(sm.position(0) + sm.length(0)), got->whole.end)
                << pattern << " on '" << subject << "'";
        }
        ++compared;
    }
    EXPECT_EQ(compared, 3000);
}

TEST(Ere, EmptyRequiredIterationDoesNotEndLoop)
{
    auto m = Regex("(b?|c)+").search("c");
    ASSERT_TRUE(m);
    EXPECT_EQ(m->whole.end, 1u);
    EXPECT_TRUE(Regex("^(b?|c)+$").search("c"));
}
