#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace farmledger {

enum class ErrorCode {
  InvalidCharacter,
  InvalidLength,
  InvalidPrefix,
  Malformed,
  TooLarge,
  NotFound,
  MissingBlock,
  IntegrityError,
  MalformedMultiaddr,
  NoServersReachable,
  NotFoundAnywhere,
  MalformedToken,
  UnknownKey,
  BadSignature,
  AuthError,
  NotOwner,
  HeaderMismatch,
  RowError,
  NotADataset,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace farmledger
