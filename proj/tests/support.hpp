#pragma once

#include "enumkit/e164.hpp"
#include "enumkit/naptr.hpp"

#include <random>
#include <string>
#include <vector>

namespace fixtures {

inline const std::string kJoe = "112025551212";

// The sample record block, verbatim.
inline const std::vector<std::string> kSampleLines = {
    R"(IN NAPTR 102 10 "u" "tel+E2U" "!^.*$!tel:+112025551212!" .)",
    R"(IN NAPTR 10 10 "u" "sip+E2U" "!+(.*)!sip:johndoe@company.com!" .)",
    R"(IN NAPTR 100 10 "u" "mailto+E2U" "!^$!mailto:johndoe@company.com!" .)",
};

// Same block with the mailto pattern corrected to "^.*$".
inline const std::vector<std::string> kCorrectedLines = {
    kSampleLines[0],
    kSampleLines[1],
    R"(IN NAPTR 100 10 "u" "mailto+E2U" "!^.*$!mailto:johndoe@company.com!" .)",
};

inline enumkit::RecordSet record_set(const std::vector<std::string>& lines, const std::string& digits = kJoe,
                                     const std::string& apex = "e164.foo", std::uint32_t ttl = 3600)
{
    enumkit::RecordSet rs{enumkit::to_domain(enumkit::E164Number::from_digits(digits), apex), ttl, {}};
    for (const auto& l : lines) {
        rs.records.push_back(enumkit::parse_record_line(l));
    }
    return rs;
}

inline std::string random_digits(std::mt19937& rng, std::size_t min_len = 1, std::size_t max_len = 15)
{
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<int> d(0, 9);
    std::string s(len(rng), '0');
    for (auto& c : s) {
        c = static_cast<char>('0' + d(rng));
    }
    return s;
}

inline enumkit::NaptrRecord random_record(std::mt19937& rng, int tag)
{
    static const std::vector<std::string> apps = {"sip", "tel", "mailto", "h323", "web:http", "x-Custom"};
    static const std::string subst_chars = "abcXYZ019:@.+-_\"\\ !#";
    enumkit::NaptrRecord r;
    r.order = static_cast<std::uint16_t>(rng());
    r.preference = static_cast<std::uint16_t>(rng());
    r.flags = rng() % 5 ? "u" : "";
    const auto& app = apps[rng() % apps.size()];
    r.service = rng() % 2 ? app + "+E2U" : "E2U+" + app;
    char delim = "!/~#"[rng() % 4];
    r.rewrite.delimiter = delim;
    r.rewrite.pattern = std::vector<std::string>{"^.*$", "^+1(.*)$", "(.*)", "^$", "[0-9]+", "a|b"}[rng() % 6];
    for (std::size_t k = 1 + rng() % 20; k > 0; --k) {
        char c = subst_chars[rng() % subst_chars.size()];
        if (c != delim && c != '\\') {
            r.rewrite.substitution += c;
        }
    }
    r.replacement = rng() % 3 ? "" : "next" + std::to_string(tag) + ".example";
    return r;
}

// Naive reference conversion used as an oracle.
inline std::string naive_domain(const std::string& digits, const std::string& apex)
{
    std::string out;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        out += *it;
        out += '.';
    }
    return out + apex;
}

} // namespace fixtures
