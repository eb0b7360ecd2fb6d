#include "cha/error.hpp"

namespace cha {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UnknownTask: return "UnknownTask";
    case Errc::StorageFailure: return "StorageFailure";
    case Errc::MalformedKey: return "MalformedKey";
    case Errc::UnknownKey: return "UnknownKey";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::UseBeforeDefine: return "UseBeforeDefine";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::EmptyBlock: return "EmptyBlock";
    case Errc::NoTaskCall: return "NoTaskCall";
    case Errc::MissingDecisionMarker: return "MissingDecisionMarker";
    case Errc::PlanParseFailed: return "PlanParseFailed";
    case Errc::BackendError: return "BackendError";
    case Errc::NoFixtureMatch: return "NoFixtureMatch";
    case Errc::RemoteError: return "RemoteError";
    case Errc::Timeout: return "Timeout";
    case Errc::ParseError: return "ParseError";
    case Errc::AmbiguousMatchers: return "AmbiguousMatchers";
    case Errc::TranslationFailure: return "TranslationFailure";
    case Errc::UnsupportedLanguage: return "UnsupportedLanguage";
    case Errc::UnknownPatient: return "UnknownPatient";
    case Errc::BadDate: return "BadDate";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::UnknownMode: return "UnknownMode";
    case Errc::TooShort: return "TooShort";
    case Errc::NoPeaks: return "NoPeaks";
    case Errc::MissingFeature: return "MissingFeature";
    case Errc::NoResults: return "NoResults";
    case Errc::ClientError: return "ClientError";
    case Errc::FetchFailure: return "FetchFailure";
    case Errc::NotHtml: return "NotHtml";
    case Errc::FieldMissing: return "FieldMissing";
    case Errc::ConfigError: return "ConfigError";
    case Errc::BindFailure: return "BindFailure";
    case Errc::EngineBusy: return "EngineBusy";
    case Errc::NotFound: return "NotFound";
    case Errc::FixtureError: return "FixtureError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace cha
