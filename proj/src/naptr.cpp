#include "enumkit/naptr.hpp"

#include "enumkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <map>
#include <numeric>

namespace enumkit {

namespace {

[[noreturn]] void syntax_error(const std::string& msg, std::size_t column, Errc code = Errc::SyntaxError)
{
    Error e(code, msg + " (column " + std::to_string(column) + ")");
    e.column = column;
    throw e;
}

struct Token {
    std::string text; // unescaped
    bool quoted = false;
    std::size_t column = 0; // 1-based
};

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r';
}

std::vector<Token> tokenize(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (is_space(line[i])) {
            ++i;
            continue;
        }
        if (line[i] == ';') {
            break;
        }
        Token tok;
        tok.column = i + 1;
        if (line[i] == '"') {
            tok.quoted = true;
            ++i;
            bool closed = false;
            while (i < line.size()) {
                char c = line[i];
                if (c == '"') {
                    closed = true;
                    ++i;
                    break;
                }
                if (c == '\\') {
                    if (i + 1 >= line.size()) {
                        syntax_error("dangling escape", i + 1);
                    }
                    if (i + 3 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])) &&
                        std::isdigit(static_cast<unsigned char>(line[i + 2])) &&
                        std::isdigit(static_cast<unsigned char>(line[i + 3]))) {
                        int v = (line[i + 1] - '0') * 100 + (line[i + 2] - '0') * 10 + (line[i + 3] - '0');
                        if (v > 255) {
                            syntax_error("escape \\DDD out of range", i + 1);
                        }
                        tok.text.push_back(static_cast<char>(v));
                        i += 4;
                    } else {
                        tok.text.push_back(line[i + 1]);
                        i += 2;
                    }
                    continue;
                }
                tok.text.push_back(c);
                ++i;
            }
            if (!closed) {
                syntax_error("unterminated quoted string", tok.column);
            }
            if (i < line.size() && !is_space(line[i]) && line[i] != ';') {
                syntax_error("missing space after quoted string", i + 1);
            }
        } else {
            while (i < line.size() && !is_space(line[i]) && line[i] != ';') {
                if (line[i] == '"') {
                    syntax_error("unexpected quote", i + 1);
                }
                tok.text.push_back(line[i]);
                ++i;
            }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

std::uint16_t parse_u16(const Token& tok, const char* what)
{
    if (tok.quoted || tok.text.empty() ||
        !std::all_of(tok.text.begin(), tok.text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        syntax_error(std::string(what) + " must be a decimal integer", tok.column);
    }
    if (tok.text.size() > 5 || std::stoul(tok.text) > 65535) {
        syntax_error(std::string(what) + " exceeds 65535", tok.column, Errc::RangeError);
    }
    return static_cast<std::uint16_t>(std::stoul(tok.text));
}

bool all_digits(std::string_view s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<std::uint32_t> parse_ttl(std::string_view s)
{
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!all_digits(s) || ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

std::string strip_trailing_dot(std::string_view s)
{
    if (s.size() > 1 && s.back() == '.') {
        s.remove_suffix(1);
    }
    return std::string(s);
}

} // namespace

ServiceField parse_service_field(std::string_view s)
{
    auto plus = s.find('+');
    if (s.empty() || plus == std::string_view::npos || s.find('+', plus + 1) != std::string_view::npos) {
        fail(Errc::MalformedService, "service '" + std::string(s) + "' needs exactly one '+'");
    }
    auto left = s.substr(0, plus);
    auto right = s.substr(plus + 1);
    if (iequals(right, "E2U") && !left.empty() && !iequals(left, "E2U")) {
        return {std::string(left), "E2U"};
    }
    if (iequals(left, "E2U") && !right.empty() && !iequals(right, "E2U")) {
        return {std::string(right), "E2U"};
    }
    fail(Errc::MalformedService, "service '" + std::string(s) + "' has no E2U side");
}

RewriteRule RewriteRule::parse(std::string_view field, ere::PlusMode mode)
{
    if (field.empty()) {
        fail(Errc::SyntaxError, "empty rewrite rule");
    }
    char delim = field.front();
    if ((delim >= '0' && delim <= '9') || delim == '\\') {
        fail(Errc::SyntaxError, std::string("invalid rewrite delimiter '") + delim + "'");
    }
    if (std::count(field.begin(), field.end(), delim) != 3 || field.back() != delim) {
        fail(Errc::SyntaxError, "rewrite rule '" + std::string(field) + "' needs exactly three delimiters");
    }
    auto second = field.find(delim, 1);
    RewriteRule rule;
    rule.delimiter = delim;
    rule.pattern = std::string(field.substr(1, second - 1));
    rule.substitution = std::string(field.substr(second + 1, field.size() - second - 2));
    ere::Regex compiled(rule.pattern, mode); // validation only
    return rule;
}

std::string RewriteRule::to_string() const
{
    return std::string(1, delimiter) + pattern + delimiter + substitution + delimiter;
}

MasterLine parse_master_line(std::string_view line, const ParseOptions& opts)
{
    auto tokens = tokenize(line);
    std::size_t in_at = 0;
    while (in_at < tokens.size() && !(!tokens[in_at].quoted && iequals(tokens[in_at].text, "IN"))) {
        ++in_at;
    }
    if (in_at == tokens.size()) {
        syntax_error("expected 'IN NAPTR'", tokens.empty() ? 1 : tokens.front().column);
    }
    if (in_at > 2) {
        syntax_error("unexpected token before class", tokens[2].column);
    }

    MasterLine out;
    for (std::size_t i = 0; i < in_at; ++i) {
        const auto& tok = tokens[i];
        if (tok.quoted) {
            syntax_error("unexpected quoted string", tok.column);
        }
        if (auto ttl = parse_ttl(tok.text); ttl && !out.ttl && (i == 1 || in_at == 1)) {
            out.ttl = ttl;
        } else if (i == 0 && !out.owner) {
            out.owner = tok.text;
        } else {
            syntax_error("bad owner/TTL prefix", tok.column);
        }
    }

    std::size_t t = in_at + 1;
    if (t >= tokens.size() || tokens[t].quoted || !iequals(tokens[t].text, "NAPTR")) {
        syntax_error("expected NAPTR", t < tokens.size() ? tokens[t].column : line.size() + 1);
    }
    ++t;
    if (tokens.size() - t < 6) {
        syntax_error("NAPTR needs order, preference, flags, service, regexp and replacement",
                     line.size() + 1);
    }
    if (tokens.size() - t > 6) {
        syntax_error("trailing data after replacement", tokens[t + 6].column);
    }

    auto& r = out.record;
    r.order = parse_u16(tokens[t], "order");
    r.preference = parse_u16(tokens[t + 1], "preference");

    const auto& flags = tokens[t + 2];
    r.flags = lowercase(flags.text);
    if (!r.flags.empty() && r.flags != "u") {
        syntax_error("unsupported flag '" + flags.text + "'", flags.column, Errc::UnsupportedFlag);
    }

    const auto& service = tokens[t + 3];
    try {
        parse_service_field(service.text);
    } catch (const Error& e) {
        syntax_error(e.what(), service.column, Errc::MalformedService);
    }
    r.service = service.text;

    const auto& regexp = tokens[t + 4];
    try {
        r.rewrite = RewriteRule::parse(regexp.text, opts.plus_mode);
    } catch (const Error& e) {
        syntax_error(e.what(), regexp.column, e.code());
    }

    const auto& repl = tokens[t + 5];
    if (repl.quoted || repl.text.empty()) {
        syntax_error("replacement must be a domain name or '.'", repl.column);
    }
    r.replacement = repl.text == "." ? std::string() : strip_trailing_dot(repl.text);
    return out;
}

NaptrRecord parse_record_line(std::string_view line, const ParseOptions& opts)
{
    return parse_master_line(line, opts).record;
}

std::string quote_character_string(std::string_view text)
{
    std::string out = "\"";
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (c == '"' || c == '\\') {
            out.push_back('\\');
            out.push_back(ch);
        } else if (c < 0x20 || c > 0x7e) {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\%03u", static_cast<unsigned>(c));
            out += buf;
        } else {
            out.push_back(ch);
        }
    }
    out.push_back('"');
    return out;
}

std::string serialize_record(const NaptrRecord& r)
{
    std::string out = "IN NAPTR ";
    out += std::to_string(r.order);
    out += ' ';
    out += std::to_string(r.preference);
    out += ' ';
    out += quote_character_string(r.flags);
    out += ' ';
    out += quote_character_string(r.service);
    out += ' ';
    out += quote_character_string(r.rewrite.to_string());
    out += ' ';
    out += r.replacement.empty() ? "." : r.replacement + ".";
    return out;
}

std::optional<ContactUri> apply_rewrite(const RewriteRule& rule, std::string_view aus, ere::PlusMode mode)
{
    ere::Regex re(rule.pattern, mode);
    auto m = re.search(aus);
    if (!m) {
        return std::nullopt;
    }

    std::string out;
    const auto& sub = rule.substitution;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub[i] != '\\' || i + 1 == sub.size()) {
            out.push_back(sub[i]);
            continue;
        }
        char next = sub[++i];
        if (next >= '1' && next <= '9') {
            auto idx = static_cast<std::size_t>(next - '0');
            if (idx > re.group_count()) {
                fail(Errc::BadBackReference, "back-reference \\" + std::string(1, next) + " exceeds " +
                                                 std::to_string(re.group_count()) + " capture group(s)");
            }
            if (const auto& g = m->groups[idx - 1]) {
                out.append(aus.substr(g->begin, g->end - g->begin));
            }
        } else {
            out.push_back(next);
        }
    }

    ContactUri uri;
    if (auto colon = out.find(':'); colon != std::string::npos) {
        uri.scheme = out.substr(0, colon);
        uri.body = out.substr(colon + 1);
    } else {
        uri.body = out;
    }
    return uri;
}

std::vector<ContactUri> select_services(const RecordSet& rs, std::string_view aus,
                                        const std::optional<std::string>& service_filter)
{
    std::vector<std::size_t> idx(rs.records.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = rs.records[a];
        const auto& y = rs.records[b];
        return std::tie(x.order, x.preference) < std::tie(y.order, y.preference);
    });

    std::vector<ContactUri> out;
    for (auto i : idx) {
        const auto& rec = rs.records[i];
        if (rec.flags != "u") {
            continue;
        }
        auto app = lowercase(parse_service_field(rec.service).app);
        if (service_filter && !iequals(app, *service_filter)) {
            continue;
        }
        if (auto uri = apply_rewrite(rec.rewrite, aus)) {
            uri->source_service = app;
            out.push_back(std::move(*uri));
        }
    }
    if (out.empty()) {
        fail(Errc::NoApplicableRecords, "no applicable NAPTR records for " + std::string(aus));
    }
    return out;
}

std::vector<RecordSet> parse_zone(std::string_view text, std::string_view apex, const ParseOptions& opts)
{
    std::vector<RecordSet> sets;
    std::map<std::string, std::size_t> index;
    std::map<std::size_t, bool> ttl_fixed;
    std::optional<std::string> origin;
    std::uint32_t default_ttl = kDefaultTtlSeconds;

    auto locate = [&](const std::string& owner_text, std::size_t line_no, std::uint32_t ttl) -> std::size_t {
        EnumDomain owner = [&] {
            try {
                return EnumDomain::parse(owner_text, apex);
            } catch (Error& e) {
                e.line = line_no;
                throw;
            }
        }();
        auto key = owner.to_string();
        if (auto it = index.find(key); it != index.end()) {
            return it->second;
        }
        sets.push_back(RecordSet{std::move(owner), ttl, {}});
        index.emplace(key, sets.size() - 1);
        return sets.size() - 1;
    };

    bool origin_owns_set = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || raw[first] == ';') {
            continue;
        }
        try {
            if (raw[first] == '$') {
                auto toks = tokenize(raw.substr(first + 1));
                if (toks.empty()) {
                    syntax_error("empty directive", first + 1);
                }
                const auto& dir = toks.front();
                if (toks.size() != 2) {
                    syntax_error("directive takes one argument", first + 1);
                }
                if (iequals(dir.text, "ORIGIN")) {
                    origin = toks[1].text;
                    auto bare = std::string_view(*origin);
                    if (bare.ends_with('.')) {
                        bare.remove_suffix(1);
                    }
                    origin_owns_set = !iequals(bare, apex);
                    if (origin_owns_set) {
                        locate(*origin, line_no, default_ttl);
                    }
                } else if (iequals(dir.text, "TTL")) {
                    auto ttl = parse_ttl(toks[1].text);
                    if (!ttl) {
                        syntax_error("bad $TTL value", first + 1 + toks[1].column);
                    }
                    default_ttl = *ttl;
                    if (origin && origin_owns_set) {
                        auto i = locate(*origin, line_no, default_ttl);
                        if (!ttl_fixed[i]) {
                            sets[i].ttl_seconds = default_ttl;
                        }
                    }
                } else {
                    syntax_error("unknown directive $" + dir.text, first + 1);
                }
                continue;
            }

            auto parsed = parse_master_line(raw, opts);
            std::string owner_text;
            if (!parsed.owner || *parsed.owner == "@") {
                if (!origin) {
                    syntax_error("record without owner or $ORIGIN", first + 1);
                }
                owner_text = *origin;
            } else if (parsed.owner->back() == '.') {
                owner_text = *parsed.owner;
            } else if (origin) {
                owner_text = *parsed.owner + "." + *origin;
            } else {
                owner_text = *parsed.owner;
            }
            auto i = locate(owner_text, line_no, parsed.ttl.value_or(default_ttl));
            if (parsed.ttl) {
                if (ttl_fixed[i] && sets[i].ttl_seconds != *parsed.ttl) {
                    syntax_error("conflicting TTLs within one record set", first + 1);
                }
                sets[i].ttl_seconds = *parsed.ttl;
            }
            ttl_fixed[i] = true;
            sets[i].records.push_back(std::move(parsed.record));
        } catch (Error& e) {
            Error located(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
            located.line = line_no;
            located.column = e.column;
            throw located;
        }
    }
    return sets;
}

std::string serialize_zone(const std::vector<RecordSet>& sets)
{
    std::string out;
    for (const auto& rs : sets) {
        out += "$ORIGIN " + rs.owner.to_string() + ".\n";
        out += "$TTL " + std::to_string(rs.ttl_seconds) + "\n";
        for (const auto& r : rs.records) {
            out += serialize_record(r);
            out += '\n';
        }
    }
    return out;
}

} // namespace enumkit
