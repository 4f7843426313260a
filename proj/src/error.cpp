#include "enumkit/error.hpp"

namespace enumkit {

std::string_view errc_name(Errc code)
{
    switch (code) {
    case Errc::UnclassifiableInput: return "UnclassifiableInput";
    case Errc::NotANumber: return "NotANumber";
    case Errc::TooLong: return "TooLong";
    case Errc::EmptyNumber: return "EmptyNumber";
    case Errc::MalformedDomain: return "MalformedDomain";
    case Errc::ApexMismatch: return "ApexMismatch";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::RangeError: return "RangeError";
    case Errc::UnsupportedFlag: return "UnsupportedFlag";
    case Errc::MalformedService: return "MalformedService";
    case Errc::BadPattern: return "BadPattern";
    case Errc::BadBackReference: return "BadBackReference";
    case Errc::NoApplicableRecords: return "NoApplicableRecords";
    case Errc::InvalidCountryCode: return "InvalidCountryCode";
    case Errc::AlreadyAuthorized: return "AlreadyAuthorized";
    case Errc::ProviderMismatch: return "ProviderMismatch";
    case Errc::UnknownCountry: return "UnknownCountry";
    case Errc::UnknownProvider: return "UnknownProvider";
    case Errc::WrongCountryCode: return "WrongCountryCode";
    case Errc::AlreadyDelegated: return "AlreadyDelegated";
    case Errc::UnknownNumber: return "UnknownNumber";
    case Errc::AuthFailed: return "AuthFailed";
    case Errc::NotDelegatedHere: return "NotDelegatedHere";
    case Errc::DuplicateRegistration: return "DuplicateRegistration";
    case Errc::NoSuchRegistration: return "NoSuchRegistration";
    case Errc::WrongCarrier: return "WrongCarrier";
    case Errc::OpenChallengeExists: return "OpenChallengeExists";
    case Errc::NoOpenChallenge: return "NoOpenChallenge";
    case Errc::NxDomain: return "NxDomain";
    case Errc::UnknownRootId: return "UnknownRootId";
    case Errc::Timeout: return "Timeout";
    case Errc::NameTooLong: return "NameTooLong";
    case Errc::TruncatedMessage: return "TruncatedMessage";
    case Errc::CompressionLoop: return "CompressionLoop";
    case Errc::MalformedRdata: return "MalformedRdata";
    case Errc::MalformedMessage: return "MalformedMessage";
    case Errc::MessageTooLarge: return "MessageTooLarge";
    case Errc::IdMismatchExhausted: return "IdMismatchExhausted";
    case Errc::TransportError: return "TransportError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

void fail(Errc code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace enumkit
