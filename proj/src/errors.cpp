#include "farmledger/errors.hpp"

namespace farmledger {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidCharacter: return "InvalidCharacter";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::InvalidPrefix: return "InvalidPrefix";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MissingBlock: return "MissingBlock";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::MalformedMultiaddr: return "MalformedMultiaddr";
    case ErrorCode::NoServersReachable: return "NoServersReachable";
    case ErrorCode::NotFoundAnywhere: return "NotFoundAnywhere";
    case ErrorCode::MalformedToken: return "MalformedToken";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::NotOwner: return "NotOwner";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::RowError: return "RowError";
    case ErrorCode::NotADataset: return "NotADataset";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace farmledger
