#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace enumkit {

enum class Errc {
    // e164
    UnclassifiableInput,
    NotANumber,
    TooLong,
    EmptyNumber,
    MalformedDomain,
    ApexMismatch,
    // naptr
    SyntaxError,
    RangeError,
    UnsupportedFlag,
    MalformedService,
    BadPattern,
    BadBackReference,
    NoApplicableRecords,
    // registry
    InvalidCountryCode,
    AlreadyAuthorized,
    ProviderMismatch,
    UnknownCountry,
    UnknownProvider,
    WrongCountryCode,
    AlreadyDelegated,
    UnknownNumber,
    AuthFailed,
    NotDelegatedHere,
    DuplicateRegistration,
    NoSuchRegistration,
    WrongCarrier,
    OpenChallengeExists,
    NoOpenChallenge,
    // resolver
    NxDomain,
    UnknownRootId,
    Timeout,
    // dns-wire
    NameTooLong,
    TruncatedMessage,
    CompressionLoop,
    MalformedRdata,
    MalformedMessage,
    MessageTooLarge,
    IdMismatchExhausted,
    TransportError,
    // plumbing
    ConfigError,
    IoError,
    UnknownScenario,
    InvalidArgument,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

    // 1-based source position for parse errors, when known.
    std::optional<std::size_t> line;
    std::optional<std::size_t> column;

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& what);

} // namespace enumkit
