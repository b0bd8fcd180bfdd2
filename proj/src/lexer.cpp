#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace arlang {

namespace {

bool is_ident_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '+': case '-': case '*': case '/': case '!': case '?':
    case '<': case '>': case '=': case '_': case '%': case '&':
    case '^': case '~': case '$':
      return true;
    default:
      return false;
  }
}

bool is_ident_start(char c) {
  return is_ident_char(c) && !std::isdigit(static_cast<unsigned char>(c));
}

struct Cursor {
  std::string_view src;
  size_t i = 0;
  int line = 1;
  int col = 1;

  bool done() const { return i >= src.size(); }
  char peek(size_t ahead = 0) const {
    return i + ahead < src.size() ? src[i + ahead] : '\0';
  }
  char advance() {
    char c = src[i++];
    if (c == '\n') {
      line++;
      col = 1;
    } else {
      col++;
    }
    return c;
  }
  SourcePos pos() const { return {line, col}; }
};

} // namespace

const char* tok_kind_name(TokKind k) {
  switch (k) {
    case TokKind::OpenParen: return "open-paren";
    case TokKind::CloseParen: return "close-paren";
    case TokKind::Number: return "number";
    case TokKind::StringLit: return "string-literal";
    case TokKind::SymbolLit: return "symbol-literal";
    case TokKind::Identifier: return "identifier";
    case TokKind::QualifiedIdentifier: return "qualified-identifier";
    case TokKind::HashConstant: return "hash-constant";
  }
  return "token";
}

std::vector<Token> tokenize(std::string_view source) {
  std::vector<Token> out;
  Cursor c{source};

  auto read_ident = [&](SourcePos at) -> std::string {
    std::string name;
    if (!is_ident_start(c.peek()))
      fail(ErrKind::Lex, at, std::string("expected identifier, found '") + c.peek() + "'");
    while (!c.done() && is_ident_char(c.peek())) name.push_back(c.advance());
    return name;
  };

  while (!c.done()) {
    char ch = c.peek();
    SourcePos at = c.pos();

    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
      c.advance();
      continue;
    }
    if (ch == '/' && c.peek(1) == '/') {
      while (!c.done() && c.peek() != '\n') c.advance();
      continue;
    }
    if (ch == '(') {
      c.advance();
      out.push_back({TokKind::OpenParen, "(", 0, at});
      continue;
    }
    if (ch == ')') {
      c.advance();
      out.push_back({TokKind::CloseParen, ")", 0, at});
      continue;
    }
    if (ch == '"') {
      c.advance();
      std::string text;
      for (;;) {
        if (c.done() || c.peek() == '\n')
          fail(ErrKind::Lex, at, "unterminated string literal");
        char d = c.advance();
        if (d == '"') break;
        if (d == '\\') {
          if (c.done()) fail(ErrKind::Lex, at, "unterminated string literal");
          char e = c.advance();
          if (e == '"' || e == '\\') {
            text.push_back(e);
          } else {
            fail(ErrKind::Lex, at,
                 std::string("unsupported string escape '\\") + e + "'");
          }
        } else {
          text.push_back(d);
        }
      }
      out.push_back({TokKind::StringLit, std::move(text), 0, at});
      continue;
    }
    if (ch == '\'') {
      c.advance();
      std::string name = read_ident(c.pos());
      out.push_back({TokKind::SymbolLit, std::move(name), 0, at});
      continue;
    }
    if (ch == '#') {
      c.advance();
      std::string name;
      while (!c.done() && is_ident_char(c.peek())) name.push_back(c.advance());
      if (name != "true" && name != "false" && name != "undefined" &&
          name != "self" && name != "Pi")
        fail(ErrKind::Lex, at, "unknown hash constant '#" + name + "'");
      out.push_back({TokKind::HashConstant, std::move(name), 0, at});
      continue;
    }

    bool starts_number = std::isdigit(static_cast<unsigned char>(ch)) ||
                         ((ch == '-' || ch == '+') &&
                          std::isdigit(static_cast<unsigned char>(c.peek(1))));
    if (starts_number) {
      std::string text;
      if (ch == '-' || ch == '+') text.push_back(c.advance());
      while (std::isdigit(static_cast<unsigned char>(c.peek()))) text.push_back(c.advance());
      if (c.peek() == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
        text.push_back(c.advance());
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) text.push_back(c.advance());
      }
      if (c.peek() == 'e' || c.peek() == 'E') {
        size_t ahead = 1;
        if (c.peek(1) == '+' || c.peek(1) == '-') ahead = 2;
        if (std::isdigit(static_cast<unsigned char>(c.peek(ahead)))) {
          text.push_back(c.advance());
          if (c.peek() == '+' || c.peek() == '-') text.push_back(c.advance());
          while (std::isdigit(static_cast<unsigned char>(c.peek()))) text.push_back(c.advance());
        }
      }
      double v = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || p != text.data() + text.size())
        fail(ErrKind::Lex, at, "malformed number '" + text + "'");
      Token t{TokKind::Number, std::move(text), v, at};
      out.push_back(std::move(t));
      continue;
    }

    if (is_ident_start(ch)) {
      std::string name = read_ident(at);
      if (c.peek() == '.') {
        c.advance();
        SourcePos after = c.pos();
        if (!is_ident_start(c.peek()))
          fail(ErrKind::Lex, at, "qualified identifier needs a stream name after '.'");
        std::string stream = read_ident(after);
        if (c.peek() == '.')
          fail(ErrKind::Lex, at, "qualified identifier may contain exactly one dot");
        out.push_back({TokKind::QualifiedIdentifier, name + "." + stream, 0, at});
      } else {
        out.push_back({TokKind::Identifier, std::move(name), 0, at});
      }
      continue;
    }

    fail(ErrKind::Lex, at, std::string("illegal character '") + ch + "'");
  }
  return out;
}

} // namespace arlang
