#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace itree {

enum class Errc {
  AnswerTagMismatch,
  WrongSignature,
  NotFound,
  Ambiguous,
  UnhandledEvent,
  SyntaxError,
  BoundViolation,
  AnswerSpaceTooLarge,
  IOError,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::AnswerTagMismatch: return "AnswerTagMismatch";
    case Errc::WrongSignature: return "WrongSignature";
    case Errc::NotFound: return "NotFound";
    case Errc::Ambiguous: return "Ambiguous";
    case Errc::UnhandledEvent: return "UnhandledEvent";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::BoundViolation: return "BoundViolation";
    case Errc::AnswerSpaceTooLarge: return "AnswerSpaceTooLarge";
    case Errc::IOError: return "IOError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace itree
