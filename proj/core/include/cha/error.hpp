#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cha {

enum class Errc {
  // task framework
  InvalidSpec,
  DuplicateName,
  UnknownTask,
  // data pipe
  StorageFailure,
  MalformedKey,
  UnknownKey,
  // plan language
  SyntaxError,
  UseBeforeDefine,
  ArityMismatch,
  EmptyBlock,
  NoTaskCall,
  // planner
  MissingDecisionMarker,
  PlanParseFailed,
  // llm gateway
  BackendError,
  NoFixtureMatch,
  RemoteError,
  Timeout,
  ParseError,
  AmbiguousMatchers,
  // translation
  TranslationFailure,
  UnsupportedLanguage,
  // health tasks
  UnknownPatient,
  BadDate,
  EmptyInput,
  UnknownMode,
  TooShort,
  NoPeaks,
  MissingFeature,
  NoResults,
  ClientError,
  FetchFailure,
  NotHtml,
  // executor
  FieldMissing,
  // service
  ConfigError,
  BindFailure,
  EngineBusy,
  NotFound,
  FixtureError,
  InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cha
