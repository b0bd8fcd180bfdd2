#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "diag.hpp"

namespace arlang {

enum class ExprKind {
  Literal,
  Var,
  Qualify, // owner.stream
  SelfRef, // #self
  Def,
  DefValues,
  Set,
  If,
  Cond,
  New,
  Invoke,
  SpawnActor,
  SpawnReactor,
  Send,
  Emit,
  Monitor,
  ReactTo,
  Tick,
  Ror,
  Out,
};

enum class LitKind { Number, String, Symbol, True, False, Undefined };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct CondArm {
  ExprPtr test; // null for the else arm
  std::vector<ExprPtr> body;
};

struct Expr {
  ExprKind kind;
  SourcePos pos;

  // Literal payload
  LitKind lit = LitKind::Undefined;
  double number = 0;
  std::string text; // string contents / symbol name

  // Name slots (meaning depends on kind):
  //   Var/Def/Set: variable name     Qualify: owner name
  //   New: class name                Invoke: selector
  //   SpawnActor/SpawnReactor/Tick/Ror: behaviour name
  //   Emit: stream name
  std::string name;
  std::string aux;                 // Qualify: stream name
  std::vector<std::string> names;  // DefValues targets; Ror input behaviours

  // Children (meaning depends on kind):
  //   Def/Set/DefValues: [init]      If: [cond, then, else?]
  //   New: [ctor-symbol, args...] or [] for the bare form
  //   Invoke: [receiver, args...]    Send: [target, selector, args...]
  //   Emit/Out/Tick: operands        Monitor: [stream, selector]
  //   ReactTo: [target, args...]
  std::vector<ExprPtr> kids;

  std::vector<CondArm> arms; // Cond only
};

ExprPtr make_expr(ExprKind kind, SourcePos pos);

enum class MemberKind { Constructor, Method, Routine };

const char* member_kind_name(MemberKind k);

struct MemberDef {
  MemberKind kind;
  std::string selector;
  std::vector<std::string> params;
  std::vector<ExprPtr> body;
  SourcePos pos;
};

struct StreamDecl {
  std::string name;
  int arity = 1;
  SourcePos pos;
};

struct ClassDef {
  std::string name;
  SourcePos pos;
  std::vector<std::string> fields;
  std::vector<MemberDef> members;
  std::unordered_map<std::string, int> member_index;
  bool builtin = false;

  const MemberDef* find_member(const std::string& selector) const {
    auto it = member_index.find(selector);
    return it == member_index.end() ? nullptr : &members[it->second];
  }
  int field_index(const std::string& field) const {
    for (size_t i = 0; i < fields.size(); i++)
      if (fields[i] == field) return static_cast<int>(i);
    return -1;
  }
};

struct ActorBehaviourDef {
  std::string name;
  SourcePos pos;
  std::vector<StreamDecl> streams;
  std::vector<std::string> fields;
  std::vector<MemberDef> members; // constructors and methods only
  std::unordered_map<std::string, int> member_index;

  const MemberDef* find_member(const std::string& selector) const {
    auto it = member_index.find(selector);
    return it == member_index.end() ? nullptr : &members[it->second];
  }
  const StreamDecl* find_stream(const std::string& stream) const {
    for (const auto& s : streams)
      if (s.name == stream) return &s;
    return nullptr;
  }
  int field_index(const std::string& field) const {
    for (size_t i = 0; i < fields.size(); i++)
      if (fields[i] == field) return static_cast<int>(i);
    return -1;
  }
};

struct ReactorBehaviourDef {
  std::string name;
  SourcePos pos;
  bool is_ror = false;
  // Normal form:
  std::vector<std::string> params;
  std::vector<ExprPtr> body; // defs, def-values, out, expressions
  // Short form (reactor Name (ror Out In...)):
  std::string ror_out;
  std::vector<std::string> ror_inputs;
};

struct ProgramDef {
  std::vector<ClassDef> classes;
  std::vector<ActorBehaviourDef> actors;
  std::vector<ReactorBehaviourDef> reactors;

  const ClassDef* find_class(const std::string& n) const {
    for (const auto& c : classes)
      if (c.name == n) return &c;
    return nullptr;
  }
  const ActorBehaviourDef* find_actor(const std::string& n) const {
    for (const auto& a : actors)
      if (a.name == n) return &a;
    return nullptr;
  }
  const ReactorBehaviourDef* find_reactor(const std::string& n) const {
    for (const auto& r : reactors)
      if (r.name == n) return &r;
    return nullptr;
  }
};

// Round-trip printer: emits source text that parses back to an equal tree.
std::string print_expr(const Expr& e);
std::string print_program(const ProgramDef& p);

bool expr_equal(const Expr& a, const Expr& b);
bool program_equal(const ProgramDef& a, const ProgramDef& b);

} // namespace arlang
