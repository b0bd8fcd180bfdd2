#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ast.hpp"
#include "sct.hpp"
#include "value.hpp"

namespace arlang {

class Program;
class Runtime;
class Process;

enum class ActKind { Constructor, Method, Routine, DagApply };

// One lexical frame. Bodies share the frame of their member/turn; cond arms
// open a child frame, so their defs scope to the remainder of the arm.
struct Scope {
  Scope* parent = nullptr;
  std::vector<std::pair<std::string, Value>> vars;

  Value* find(const std::string& name) {
    for (Scope* s = this; s; s = s->parent)
      for (auto& [n, v] : s->vars)
        if (n == name) return &v;
    return nullptr;
  }
  void define(const std::string& name, Value v) { vars.emplace_back(name, std::move(v)); }
};

struct Activation {
  ActKind kind = ActKind::Method;
  bool pure = false; // effective purity: routines, dag applies, and anything below them
  std::string class_name;
  std::string selector;
  Value receiver;
  std::vector<Value>* fields = nullptr;             // receiver field slots
  const std::vector<std::string>* field_names = nullptr;
  Activation* parent = nullptr;
  SourcePos call_pos;

  int field_index(const std::string& name) const {
    if (!field_names) return -1;
    for (size_t i = 0; i < field_names->size(); i++)
      if ((*field_names)[i] == name) return static_cast<int>(i);
    return -1;
  }
};

struct EvalContext {
  const Program& program;
  Runtime* runtime = nullptr; // null during compile-time constant folding
  Process* process = nullptr; // null during compile-time constant folding
  GuardStack* guard = nullptr;
  int depth = 0;
  int max_depth = 4096;
};

Value eval(const Expr& e, Scope& scope, Activation& act, EvalContext& cx);

// Evaluates a body sequence in the given scope; defs extend that scope.
// Returns the value of the last expression (undefined for an empty body).
Value eval_body(const std::vector<ExprPtr>& body, Scope& scope, Activation& act,
                EvalContext& cx);

// Member lookup result for user classes and builtins.
struct ResolvedMember {
  MemberKind kind;
  const MemberDef* user = nullptr;      // user-defined member
  const struct BuiltinMember* builtin = nullptr;
  std::string class_name;
};

// Looks up selector on type_of(receiver)'s class: user members first, then
// class builtins, then the universal routines (type-of, equal?, eq?).
// Returns false if the selector is unknown.
bool lookup_member(const Program& program, const Value& receiver,
                   const std::string& selector, ResolvedMember* out);

// Invokes selector on receiver. Enforces the routine-calls-only-routines rule
// (methods are rejected from pure contexts) and the termination guard on
// routine entry.
Value invoke(const Value& receiver, const std::string& selector,
             std::vector<Value> args, Activation& caller, EvalContext& cx,
             SourcePos pos);

// `new`: creates an instance with all fields #undefined, then runs the named
// constructor. `ctor` may be empty only for the builtin Random class.
Value instantiate(const std::string& class_name, const std::string& ctor,
                  std::vector<Value> args, Activation& caller, EvalContext& cx,
                  SourcePos pos);

struct BuiltinMember {
  MemberKind kind;
  int min_args;
  int max_args; // -1 = variadic
  Value (*fn)(EvalContext& cx, const Value& receiver, std::vector<Value>& args,
              SourcePos pos);
};

} // namespace arlang
