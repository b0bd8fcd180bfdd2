#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arlang {

struct SourcePos {
  int line = 0; // 1-based; 0 = unknown
  int column = 0;

  bool known() const { return line > 0; }
  std::string str() const {
    if (!known()) return "?:?";
    return std::to_string(line) + ":" + std::to_string(column);
  }
};

// Error taxonomy. Everything up to and including Compile is a load-time
// failure (exit 1); the rest abort a run (exit 2).
enum class ErrKind {
  Lex,
  Parse,
  Purity,
  Compile,
  Runtime,
  Termination,
  MethodFromPureContext,
};

class Error : public std::runtime_error {
public:
  Error(ErrKind kind, SourcePos pos, std::string message)
      : std::runtime_error(format(kind, pos, message)),
        kind_(kind),
        pos_(pos),
        message_(std::move(message)) {}

  ErrKind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return message_; }

  bool is_load_error() const {
    return kind_ == ErrKind::Lex || kind_ == ErrKind::Parse ||
           kind_ == ErrKind::Purity || kind_ == ErrKind::Compile;
  }

  static const char* kind_name(ErrKind k) {
    switch (k) {
      case ErrKind::Lex: return "lex error";
      case ErrKind::Parse: return "parse error";
      case ErrKind::Purity: return "purity violation";
      case ErrKind::Compile: return "compile error";
      case ErrKind::Runtime: return "runtime error";
      case ErrKind::Termination: return "termination violation";
      case ErrKind::MethodFromPureContext: return "method call from pure context";
    }
    return "error";
  }

private:
  static std::string format(ErrKind kind, SourcePos pos, const std::string& msg) {
    std::string s = kind_name(kind);
    if (pos.known()) {
      s += " at ";
      s += pos.str();
    }
    s += ": ";
    s += msg;
    return s;
  }

  ErrKind kind_;
  SourcePos pos_;
  std::string message_;
};

[[noreturn]] inline void fail(ErrKind kind, SourcePos pos, std::string msg) {
  throw Error(kind, pos, std::move(msg));
}

} // namespace arlang
