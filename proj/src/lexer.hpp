#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "diag.hpp"

namespace arlang {

enum class TokKind {
  OpenParen,
  CloseParen,
  Number,
  StringLit,
  SymbolLit,          // 'blow
  Identifier,         // blade-length, +, set-first!
  QualifiedIdentifier,// sirocco.speed (exactly one dot)
  HashConstant,       // #true #false #undefined #self #Pi
};

struct Token {
  TokKind kind;
  std::string lexeme; // identifier/symbol name, string contents, raw number
  double number = 0;  // Number only
  SourcePos pos;
};

const char* tok_kind_name(TokKind k);

// Comments run from "//" to end of line. Throws Error(ErrKind::Lex) with the
// offending position on unterminated strings, bad escapes, stray characters,
// unknown hash constants and malformed qualified identifiers.
std::vector<Token> tokenize(std::string_view source);

} // namespace arlang
