#include "enumkit/e164.hpp"

#include "enumkit/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace enumkit {

namespace {

bool is_digit(char c)
{
    return c >= '0' && c <= '9';
}

bool is_separator(char c)
{
    return c == '+' || c == '-' || c == '.' || c == '(' || c == ')' || c == ' ';
}

std::string normalize_apex(std::string_view apex)
{
    while (!apex.empty() && apex.back() == '.') {
        apex.remove_suffix(1);
    }
    if (apex.empty()) {
        fail(Errc::MalformedDomain, "empty apex");
    }
    return lowercase(apex);
}

} // namespace

std::string lowercase(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

E164Number E164Number::from_digits(std::string_view digits)
{
    if (digits.empty()) {
        fail(Errc::EmptyNumber, "number has no digits");
    }
    if (!std::all_of(digits.begin(), digits.end(), is_digit)) {
        fail(Errc::NotANumber, "non-digit in number '" + std::string(digits) + "'");
    }
    if (digits.size() > kMaxE164Digits) {
        fail(Errc::TooLong, "number exceeds 15 digits: " + std::string(digits));
    }
    return E164Number(std::string(digits));
}

E164Number normalize(std::string_view raw, const std::optional<DialingContext>& ctx)
{
    auto first = raw.find_first_not_of(' ');
    bool international = first != std::string_view::npos && raw[first] == '+';

    std::string residue;
    residue.reserve(raw.size());
    for (char c : raw) {
        if (!is_separator(c)) {
            residue.push_back(c);
        }
    }
    if (!std::all_of(residue.begin(), residue.end(), is_digit)) {
        fail(Errc::NotANumber, "non-digit residue in '" + std::string(raw) + "'");
    }
    if (residue.empty()) {
        fail(Errc::EmptyNumber, "no digits in '" + std::string(raw) + "'");
    }
    if (!international && ctx) {
        residue.insert(0, ctx->prefix);
    }
    return E164Number::from_digits(residue);
}

NumberClass classify_dial_string(const DialString& raw,
                                 std::span<const std::string> access_codes,
                                 const std::optional<DialingContext>& ctx)
{
    if (raw.raw.empty()) {
        fail(Errc::EmptyNumber, "empty dial string");
    }
    if (std::find(access_codes.begin(), access_codes.end(), raw.raw) != access_codes.end()) {
        return AccessCode{raw.raw};
    }

    std::string_view text = raw.raw;
    std::optional<std::uint32_t> root_id;
    if (auto hash = text.find('#'); hash != std::string_view::npos) {
        auto suffix = text.substr(hash + 1);
        std::uint32_t id = 0;
        auto [ptr, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), id);
        if (suffix.empty() || ec != std::errc{} || ptr != suffix.data() + suffix.size()) {
            fail(Errc::UnclassifiableInput, "bad root extension in '" + raw.raw + "'");
        }
        root_id = id;
        text = text.substr(0, hash);
    }

    try {
        auto number = normalize(text, ctx);
        if (root_id) {
            return ExtensionTagged{std::move(number), *root_id};
        }
        return number;
    } catch (const Error& e) {
        if (e.code() == Errc::NotANumber) {
            fail(Errc::UnclassifiableInput, e.what());
        }
        throw;
    }
}

EnumDomain::EnumDomain(std::string reversed_digits, std::string_view apex)
    : labels_(std::move(reversed_digits)), apex_(normalize_apex(apex))
{
    if (labels_.empty() || !std::all_of(labels_.begin(), labels_.end(), is_digit)) {
        fail(Errc::MalformedDomain, "labels must be single decimal digits");
    }
}

EnumDomain EnumDomain::parse(std::string_view text, std::string_view apex)
{
    auto want = normalize_apex(apex);
    while (!text.empty() && text.back() == '.') {
        text.remove_suffix(1);
    }
    auto lowered = lowercase(text);
    std::string_view view = lowered;

    if (view.size() <= want.size() || !view.ends_with(want) ||
        view[view.size() - want.size() - 1] != '.') {
        fail(Errc::ApexMismatch, "'" + std::string(text) + "' is not under apex '" + want + "'");
    }
    view.remove_suffix(want.size() + 1);

    std::string labels;
    std::size_t pos = 0;
    while (pos <= view.size()) {
        auto dot = view.find('.', pos);
        auto label = view.substr(pos, dot == std::string_view::npos ? std::string_view::npos : dot - pos);
        if (label.size() != 1 || !is_digit(label[0])) {
            fail(Errc::MalformedDomain, "label '" + std::string(label) + "' is not a single digit");
        }
        labels.push_back(label[0]);
        if (dot == std::string_view::npos) {
            break;
        }
        pos = dot + 1;
    }
    return EnumDomain(std::move(labels), want);
}

std::string EnumDomain::to_string() const
{
    std::string out;
    out.reserve(labels_.size() * 2 + apex_.size());
    for (char c : labels_) {
        out.push_back(c);
        out.push_back('.');
    }
    out += apex_;
    return out;
}

EnumDomain to_domain(const E164Number& number, std::string_view apex)
{
    std::string reversed(number.digits().rbegin(), number.digits().rend());
    return EnumDomain(std::move(reversed), apex);
}

E164Number from_domain(const EnumDomain& domain)
{
    const auto& l = domain.labels();
    return E164Number::from_digits(std::string(l.rbegin(), l.rend()));
}

E164Number from_domain(std::string_view text, std::string_view apex)
{
    return from_domain(EnumDomain::parse(text, apex));
}

} // namespace enumkit
