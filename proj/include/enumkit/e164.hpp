#pragma once

// E.164 digit strings and their ENUM domain form.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace enumkit {

inline constexpr std::size_t kMaxE164Digits = 15;

/// Text exactly as entered on a device. Never modified after construction.
struct DialString {
    std::string raw;
};

/// 1..15 decimal digits, country code first.
class E164Number {
public:
    /// Validates `digits` (no separators, no "+").
    static E164Number from_digits(std::string_view digits);

    const std::string& digits() const noexcept { return digits_; }
    std::size_t size() const noexcept { return digits_.size(); }

    /// Application unique string fed to NAPTR rules: "+<digits>".
    std::string aus() const { return "+" + digits_; }

    bool has_prefix(std::string_view prefix) const
    {
        return std::string_view(digits_).starts_with(prefix);
    }

    auto operator<=>(const E164Number&) const = default;

private:
    explicit E164Number(std::string digits) : digits_(std::move(digits)) {}
    std::string digits_;
};

/// Reversed single-digit labels under an apex. The apex is kept lowercase.
class EnumDomain {
public:
    EnumDomain(std::string reversed_digits, std::string_view apex);

    /// Parses "d.d.d.<apex>" case-insensitively against the expected apex.
    static EnumDomain parse(std::string_view text, std::string_view apex);

    /// Least significant digit first, one char per label.
    const std::string& labels() const noexcept { return labels_; }
    const std::string& apex() const noexcept { return apex_; }
    std::size_t label_count() const noexcept { return labels_.size(); }

    /// Lowercase, dot-joined, no trailing dot.
    std::string to_string() const;

    auto operator<=>(const EnumDomain&) const = default;

private:
    std::string labels_;
    std::string apex_;
};

struct AccessCode {
    std::string code;
    bool operator==(const AccessCode&) const = default;
};

struct ExtensionTagged {
    E164Number number;
    std::uint32_t root_id;
    bool operator==(const ExtensionTagged&) const = default;
};

using NumberClass = std::variant<E164Number, AccessCode, ExtensionTagged>;

/// Digit prefix prepended to numbers dialed without a leading "+".
struct DialingContext {
    std::string prefix;
};

/// Strips "+ - . ( ) space", applies the dialing context when there is no
/// leading "+", and validates the result.
E164Number normalize(std::string_view raw, const std::optional<DialingContext>& ctx = std::nullopt);

NumberClass classify_dial_string(const DialString& raw,
                                 std::span<const std::string> access_codes,
                                 const std::optional<DialingContext>& ctx = std::nullopt);

EnumDomain to_domain(const E164Number& number, std::string_view apex);
E164Number from_domain(const EnumDomain& domain);
E164Number from_domain(std::string_view text, std::string_view apex);

/// ASCII lowercase copy.
std::string lowercase(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

} // namespace enumkit
