#pragma once

#include <string_view>

#include "ast.hpp"
#include "lexer.hpp"

namespace arlang {

// Parses a whole program and validates its top-level structure: one Main
// actor with a zero-argument start constructor, unique names per category,
// unique member/stream/field names per behaviour. Throws Error on failure.
ProgramDef parse_program(std::vector<Token> tokens);

ProgramDef parse_source(std::string_view source);

enum class PurityContext { Routine, ReactorBody };

// Rejects set!, spawn-actor, spawn-reactor, send, emit, monitor and react-to
// anywhere in the expression tree. Throws Error(ErrKind::Purity) naming the
// offending form and its position.
void check_purity(const Expr& body, PurityContext ctx);

// Applies check_purity to every routine body and reactor body in the program.
void check_program_purity(const ProgramDef& program);

} // namespace arlang
