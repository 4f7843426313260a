#include "support.hpp"

#include "enumkit/error.hpp"
#include "enumkit/naptr.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace enumkit;

namespace {

Errc code_of(auto&& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return Errc::InvalidArgument;
}

std::vector<std::string> rendered(const std::vector<ContactUri>& v)
{
    std::vector<std::string> out;
    for (const auto& c : v) {
        out.push_back(c.render());
    }
    return out;
}

} // namespace

TEST(ParseRecord, SampleLines)
{
    auto tel = parse_record_line(fixtures::kSampleLines[0]);
    EXPECT_EQ(tel.order, 102);
    EXPECT_EQ(tel.preference, 10);
    EXPECT_EQ(tel.flags, "u");
    EXPECT_EQ(tel.service, "tel+E2U");
    EXPECT_EQ(tel.rewrite.delimiter, '!');
    EXPECT_EQ(tel.rewrite.pattern, "^.*$");
    EXPECT_EQ(tel.rewrite.substitution, "tel:+112025551212");
    EXPECT_EQ(tel.replacement, "");

    auto mail = parse_record_line(fixtures::kSampleLines[2]);
    EXPECT_EQ(mail.order, 100);
    EXPECT_EQ(mail.service, "mailto+E2U");
    EXPECT_EQ(mail.rewrite.pattern, "^$");
}

TEST(ParseRecord, Errors)
{
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "u" "tel+E2U" "!a!b" .)"); }), Errc::SyntaxError);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 70000 10 "u" "tel+E2U" "!a!b!" .)"); }), Errc::RangeError);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 70000 "u" "tel+E2U" "!a!b!" .)"); }), Errc::RangeError);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "s" "tel+E2U" "!a!b!" .)"); }), Errc::UnsupportedFlag);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "u" "telE2U" "!a!b!" .)"); }), Errc::MalformedService);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "u" "tel+E2U" "!(!b!" .)"); }), Errc::BadPattern);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "u" "tel+E2U" "!a!b!")"); }), Errc::SyntaxError);
    EXPECT_EQ(code_of([] { parse_record_line(R"(IN NAPTR 10 10 "u" "tel+E2U" "!a!b! .)"); }), Errc::SyntaxError);
}

TEST(ParseRecord, ErrorCarriesColumn)
{
    try {
        parse_record_line(R"(IN NAPTR 10 10 "u" "tel+E2U" "!a!b" .)");
        FAIL();
    } catch (const Error& e) {
        ASSERT_TRUE(e.column.has_value());
        EXPECT_GT(*e.column, 1u);
    }
}

TEST(ParseRecord, EmptyFlagsAccepted)
{
    auto r = parse_record_line(R"(IN NAPTR 10 10 "" "E2U+sip" "!^.*$!sip:a@b!" .)");
    EXPECT_EQ(r.flags, "");
    EXPECT_EQ(parse_record_line(R"(IN NAPTR 10 10 "U" "E2U+sip" "!^.*$!sip:a@b!" .)").flags, "u");
}

TEST(ServiceField, BothOrders)
{
    EXPECT_EQ(parse_service_field("tel+E2U"), (ServiceField{"tel", "E2U"}));
    EXPECT_EQ(parse_service_field("E2U+sip"), (ServiceField{"sip", "E2U"}));
    EXPECT_EQ(parse_service_field("e2u+sip").app, "sip");
    EXPECT_EQ(code_of([] { parse_service_field("telE2U"); }), Errc::MalformedService);
    EXPECT_EQ(code_of([] { parse_service_field("a+b+E2U"); }), Errc::MalformedService);
    EXPECT_EQ(code_of([] { parse_service_field("tel+sip"); }), Errc::MalformedService);
}

TEST(Serialize, Canonical)
{
    for (const auto& line : fixtures::kSampleLines) {
        EXPECT_EQ(serialize_record(parse_record_line(line)), line);
    }
    auto r = parse_record_line(R"(IN   NAPTR  5 6 "u"  "E2U+sip" "!^.*$!sip:x@y!"   target.example.)");
    EXPECT_EQ(r.replacement, "target.example");
    EXPECT_EQ(serialize_record(r), R"(IN NAPTR 5 6 "u" "E2U+sip" "!^.*$!sip:x@y!" target.example.)");
}

TEST(Serialize, RandomRoundTrip)
{
    std::mt19937 rng(99);
    const std::vector<std::string> apps = {"sip", "tel", "mailto", "h323", "web:http", "x-Custom"};
    const std::string subst_chars = "abcXYZ019:@.+-_\"\\ !#";
    for (int i = 0; i < 500; ++i) {
        NaptrRecord r;
        r.order = static_cast<std::uint16_t>(rng());
        r.preference = static_cast<std::uint16_t>(rng());
        r.flags = rng() % 5 ? "u" : "";
        const auto& app = apps[rng() % apps.size()];
        r.service = rng() % 2 ? app + "+E2U" : "E2U+" + app;
        char delim = "!/~#"[rng() % 4];
        r.rewrite.delimiter = delim;
        r.rewrite.pattern = std::vector<std::string>{"^.*$", "^+1(.*)$", "(.*)", "^$", "[0-9]+", "a|b"}[rng() % 6];
        std::string subst;
        for (std::size_t k = 1 + rng() % 20; k > 0; --k) {
            char c = subst_chars[rng() % subst_chars.size()];
            if (c != delim && c != '\\') {
                subst += c;
            }
        }
        r.rewrite.substitution = subst;
        r.replacement = rng() % 3 ? "" : "next" + std::to_string(i) + ".example";

        auto line = serialize_record(r);
        auto back = parse_record_line(line);
        ASSERT_EQ(back, r) << line;
        ASSERT_EQ(serialize_record(back), line);
    }
}

TEST(Rewrite, SampleRules)
{
    const std::string aus = "+112025551212";
    auto tel = apply_rewrite(RewriteRule::parse("!^.*$!tel:+112025551212!"), aus);
    ASSERT_TRUE(tel);
    EXPECT_EQ(tel->render(), "tel:+112025551212");
    EXPECT_EQ(tel->scheme, "tel");
    EXPECT_FALSE(apply_rewrite(RewriteRule::parse("!^$!mailto:johndoe@company.com!"), aus));
    auto sip = apply_rewrite(RewriteRule::parse("!+(.*)!sip:johndoe@company.com!"), aus);
    ASSERT_TRUE(sip);
    EXPECT_EQ(sip->render(), "sip:johndoe@company.com");
}

TEST(Rewrite, BackReferences)
{
    auto r = apply_rewrite(RewriteRule::parse("!^\\+1(...)(.*)$!sip:\\2@area\\1.example!"), "+12025551212");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->render(), "sip:5551212@area202.example");
    EXPECT_EQ(code_of([] { apply_rewrite(RewriteRule::parse("!^(.*)$!sip:\\2@x!"), "+1"); }),
              Errc::BadBackReference);
}

TEST(Rewrite, SchemeSplitAtFirstColon)
{
    auto r = apply_rewrite(RewriteRule::parse("!^.*$!sip:a:b@c!"), "+1");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->scheme, "sip");
    EXPECT_EQ(r->body, "a:b@c");
}

TEST(Select, SampleOrdering)
{
    auto rs = fixtures::record_set(fixtures::kSampleLines);
    EXPECT_EQ(rendered(select_services(rs, "+112025551212")),
              (std::vector<std::string>{"sip:johndoe@company.com", "tel:+112025551212"}));
    EXPECT_EQ(rendered(select_services(rs, "+112025551212", std::string("tel"))),
              (std::vector<std::string>{"tel:+112025551212"}));
    EXPECT_EQ(rendered(select_services(rs, "+112025551212", std::string("SIP"))),
              (std::vector<std::string>{"sip:johndoe@company.com"}));
    EXPECT_EQ(code_of([&] { select_services(rs, "+112025551212", std::string("mailto")); }),
              Errc::NoApplicableRecords);
}

TEST(Select, CorrectedFixtureIncludesMailto)
{
    auto rs = fixtures::record_set(fixtures::kCorrectedLines);
    EXPECT_EQ(rendered(select_services(rs, "+112025551212")),
              (std::vector<std::string>{"sip:johndoe@company.com", "mailto:johndoe@company.com", "tel:+112025551212"}));
}

TEST(Select, TieBreakIsInsertionOrder)
{
    auto rs = fixtures::record_set({R"(IN NAPTR 10 10 "u" "E2U+sip" "!^.*$!sip:first@x!" .)",
                                    R"(IN NAPTR 10 10 "u" "E2U+sip" "!^.*$!sip:second@x!" .)",
                                    R"(IN NAPTR 5 20 "u" "E2U+sip" "!^.*$!sip:zero@x!" .)"});
    EXPECT_EQ(rendered(select_services(rs, "+1")),
              (std::vector<std::string>{"sip:zero@x", "sip:first@x", "sip:second@x"}));
}

TEST(Select, NonTerminalSkipped)
{
    auto rs = fixtures::record_set({R"(IN NAPTR 1 1 "" "E2U+sip" "!^.*$!sip:chain@x!" next.example.)",
                                    R"(IN NAPTR 2 1 "u" "E2U+sip" "!^.*$!sip:ok@x!" .)"});
    EXPECT_EQ(rendered(select_services(rs, "+1")), (std::vector<std::string>{"sip:ok@x"}));
}

TEST(Select, RandomSetsMatchSortOracle)
{
    std::mt19937 rng(5);
    for (int i = 0; i < 300; ++i) {
        RecordSet rs{to_domain(E164Number::from_digits("1"), "e164.arpa"), 60, {}};
        std::vector<std::tuple<int, int, std::size_t, std::string>> expect;
        for (std::size_t k = 0; k < 1 + rng() % 8; ++k) {
            NaptrRecord r;
            r.order = static_cast<std::uint16_t>(rng() % 4);
            r.preference = static_cast<std::uint16_t>(rng() % 3);
            r.flags = "u";
            r.service = "E2U+sip";
            bool matches = rng() % 3 != 0;
            r.rewrite = RewriteRule{'!', matches ? "^.*$" : "^$", "sip:r" + std::to_string(k) + "@x"};
            rs.records.push_back(r);
            if (matches) {
                expect.emplace_back(r.order, r.preference, k, r.rewrite.substitution);
            }
        }
        std::sort(expect.begin(), expect.end());
        std::vector<std::string> want;
        for (const auto& e : expect) {
            want.push_back(std::get<3>(e));
        }
        if (want.empty()) {
            EXPECT_EQ(code_of([&] { select_services(rs, "+1"); }), Errc::NoApplicableRecords);
        } else {
            ASSERT_EQ(rendered(select_services(rs, "+1")), want);
        }
    }
}

TEST(Zone, SampleBlockWithSpacedOrigin)
{
    std::string text = "$ ORIGIN 2.1.2.1.5.5.5.2.0.2.1.1.E164.foo.\n";
    for (const auto& l : fixtures::kSampleLines) {
        text += "  " + l + "\n";
    }
    auto sets = parse_zone(text, "e164.foo");
    ASSERT_EQ(sets.size(), 1u);
    EXPECT_EQ(sets[0].owner.to_string(), "2.1.2.1.5.5.5.2.0.2.1.1.e164.foo");
    EXPECT_EQ(sets[0].ttl_seconds, kDefaultTtlSeconds);
    EXPECT_EQ(sets[0], fixtures::record_set(fixtures::kSampleLines));

    auto canonical = serialize_zone(sets);
    std::string want = "$ORIGIN 2.1.2.1.5.5.5.2.0.2.1.1.e164.foo.\n$TTL 3600\n";
    for (const auto& l : fixtures::kSampleLines) {
        want += l + "\n";
    }
    EXPECT_EQ(canonical, want);
    EXPECT_EQ(serialize_zone(parse_zone(canonical, "e164.foo")), canonical);
}

TEST(Zone, OwnersAndTtl)
{
    auto sets = parse_zone("$ORIGIN e164.arpa.\n$TTL 300\n"
                           "1.1 IN NAPTR 10 10 \"u\" \"E2U+sip\" \"!^.*$!sip:a@b!\" .\n"
                           "2.1.e164.arpa. 60 IN NAPTR 10 10 \"u\" \"E2U+sip\" \"!^.*$!sip:c@d!\" .\n",
                           "e164.arpa");
    ASSERT_EQ(sets.size(), 2u);
    EXPECT_EQ(from_domain(sets[0].owner).digits(), "11");
    EXPECT_EQ(sets[0].ttl_seconds, 300u);
    EXPECT_EQ(from_domain(sets[1].owner).digits(), "12");
    EXPECT_EQ(sets[1].ttl_seconds, 60u);
}

TEST(Zone, ErrorsReportLine)
{
    try {
        parse_zone("$ORIGIN 1.e164.arpa.\n\nIN NAPTR 10 10 \"x\" \"E2U+sip\" \"!^.*$!sip:a@b!\" .\n", "e164.arpa");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnsupportedFlag);
        ASSERT_TRUE(e.line);
        EXPECT_EQ(*e.line, 3u);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
    EXPECT_EQ(code_of([] { parse_zone("$ORIGIN 1.e164.foo.\n", "e164.arpa"); }), Errc::ApexMismatch);
}
