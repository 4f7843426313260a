#pragma once

// NAPTR records: master-file syntax, canonical serialization, rewrite
// application and service selection.

#include "enumkit/e164.hpp"
#include "enumkit/ere.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enumkit {

inline constexpr std::uint32_t kDefaultTtlSeconds = 3600;

/// "<delim><pattern><delim><substitution><delim>"
struct RewriteRule {
    char delimiter = '!';
    std::string pattern;
    std::string substitution;

    /// Splits the regexp field; the delimiter must occur exactly three times
    /// and the pattern must compile.
    static RewriteRule parse(std::string_view field, ere::PlusMode mode = ere::PlusMode::Lenient);
    std::string to_string() const;

    bool operator==(const RewriteRule&) const = default;
};

struct NaptrRecord {
    std::uint16_t order = 0;
    std::uint16_t preference = 0;
    std::string flags;   // lowercase; "u" or empty
    std::string service; // as written, e.g. "sip+E2U"
    RewriteRule rewrite;
    std::string replacement; // empty for "."; no trailing dot otherwise

    bool operator==(const NaptrRecord&) const = default;
};

struct RecordSet {
    EnumDomain owner;
    std::uint32_t ttl_seconds = kDefaultTtlSeconds;
    std::vector<NaptrRecord> records;

    bool operator==(const RecordSet&) const = default;
};

struct ContactUri {
    std::string scheme;
    std::string body;
    std::string source_service; // application name, e.g. "sip"

    std::string render() const { return scheme.empty() ? body : scheme + ":" + body; }
    bool operator==(const ContactUri&) const = default;
};

struct ServiceField {
    std::string app;
    std::string resolution; // always "E2U"
    bool operator==(const ServiceField&) const = default;
};

/// Accepts "<app>+E2U" and "E2U+<app>".
ServiceField parse_service_field(std::string_view s);

struct ParseOptions {
    ere::PlusMode plus_mode = ere::PlusMode::Lenient;
};

/// One master-file line with its optional owner and TTL prefix.
struct MasterLine {
    std::optional<std::string> owner;
    std::optional<std::uint32_t> ttl;
    NaptrRecord record;
};

MasterLine parse_master_line(std::string_view line, const ParseOptions& opts = {});
NaptrRecord parse_record_line(std::string_view line, const ParseOptions& opts = {});

/// `IN NAPTR <order> <pref> "<flags>" "<service>" "<regexp>" <replacement>`
std::string serialize_record(const NaptrRecord& r);

/// Master-file quoting of a character-string (\" \\ and \DDD escapes).
std::string quote_character_string(std::string_view text);

std::optional<ContactUri> apply_rewrite(const RewriteRule& rule, std::string_view aus,
                                        ere::PlusMode mode = ere::PlusMode::Lenient);

/// Sorted by (order, preference), stable on ties; records that are filtered
/// out, not terminal, or whose rule does not match are skipped.
std::vector<ContactUri> select_services(const RecordSet& rs, std::string_view aus,
                                        const std::optional<std::string>& service_filter = std::nullopt);

/// Zone files: "$ORIGIN"/"$ ORIGIN" and "$TTL" directives followed by
/// NAPTR lines. Owners must sit under `apex`.
std::vector<RecordSet> parse_zone(std::string_view text, std::string_view apex,
                                  const ParseOptions& opts = {});

/// Canonical zone text: one block per record set, in the given order.
std::string serialize_zone(const std::vector<RecordSet>& sets);

} // namespace enumkit
