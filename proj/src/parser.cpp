#include "parser.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <unordered_set>

namespace arlang {

namespace {

// Where an expression appears; tick/out/def-values are reactor-body-only,
// ror is handled separately by the short reactor form.
enum class BodyCtx { Member, ReactorBody };

class Parser {
public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ProgramDef parse() {
    ProgramDef prog;
    while (!done()) {
      expect(TokKind::OpenParen, "top-level form");
      const Token& head = expect(TokKind::Identifier, "top-level form name");
      if (head.lexeme == "class") {
        prog.classes.push_back(parse_class());
      } else if (head.lexeme == "actor") {
        prog.actors.push_back(parse_actor());
      } else if (head.lexeme == "reactor") {
        prog.reactors.push_back(parse_reactor());
      } else {
        fail(ErrKind::Parse, head.pos,
             "unknown top-level form '" + head.lexeme +
                 "' (expected class, actor or reactor)");
      }
    }
    validate(prog);
    return prog;
  }

private:
  std::vector<Token> toks_;
  size_t i_ = 0;

  bool done() const { return i_ >= toks_.size(); }
  const Token& peek() const {
    if (done()) fail(ErrKind::Parse, last_pos(), "unexpected end of input");
    return toks_[i_];
  }
  const Token& next() {
    const Token& t = peek();
    i_++;
    return t;
  }
  SourcePos last_pos() const {
    return toks_.empty() ? SourcePos{} : toks_.back().pos;
  }
  const Token& expect(TokKind k, const char* what) {
    const Token& t = next();
    if (t.kind != k)
      fail(ErrKind::Parse, t.pos,
           std::string("expected ") + tok_kind_name(k) + " for " + what +
               ", found " + tok_kind_name(t.kind) + " '" + t.lexeme + "'");
    return t;
  }
  bool at_close() const { return !done() && peek().kind == TokKind::CloseParen; }

  // --- top-level definitions ------------------------------------------------

  ClassDef parse_class() {
    ClassDef cls;
    const Token& name = expect(TokKind::Identifier, "class name");
    cls.name = name.lexeme;
    cls.pos = name.pos;
    while (!at_close()) {
      expect(TokKind::OpenParen, "class member");
      const Token& head = expect(TokKind::Identifier, "class member form");
      if (head.lexeme == "def-fields") {
        parse_fields(cls.fields, head.pos);
      } else if (head.lexeme == "def-constructor") {
        add_member(cls.members, cls.member_index, parse_member(MemberKind::Constructor));
      } else if (head.lexeme == "def-method") {
        add_member(cls.members, cls.member_index, parse_member(MemberKind::Method));
      } else if (head.lexeme == "def-routine") {
        add_member(cls.members, cls.member_index, parse_member(MemberKind::Routine));
      } else {
        fail(ErrKind::Parse, head.pos,
             "unknown class member form '" + head.lexeme + "'");
      }
    }
    expect(TokKind::CloseParen, "end of class");
    return cls;
  }

  ActorBehaviourDef parse_actor() {
    ActorBehaviourDef actor;
    const Token& name = expect(TokKind::Identifier, "actor behaviour name");
    actor.name = name.lexeme;
    actor.pos = name.pos;
    while (!at_close()) {
      expect(TokKind::OpenParen, "actor member");
      const Token& head = expect(TokKind::Identifier, "actor member form");
      if (head.lexeme == "def-fields") {
        parse_fields(actor.fields, head.pos);
      } else if (head.lexeme == "def-stream") {
        const Token& sname = expect(TokKind::Identifier, "stream name");
        const Token& arity = expect(TokKind::Number, "stream arity");
        if (arity.number < 1 || arity.number != std::floor(arity.number))
          fail(ErrKind::Parse, arity.pos, "stream arity must be a positive whole number");
        for (const auto& s : actor.streams)
          if (s.name == sname.lexeme)
            fail(ErrKind::Parse, sname.pos,
                 "duplicate stream '" + sname.lexeme + "' in actor " + actor.name);
        actor.streams.push_back({sname.lexeme, static_cast<int>(arity.number), sname.pos});
        expect(TokKind::CloseParen, "end of def-stream");
      } else if (head.lexeme == "def-constructor") {
        add_member(actor.members, actor.member_index, parse_member(MemberKind::Constructor));
      } else if (head.lexeme == "def-method") {
        add_member(actor.members, actor.member_index, parse_member(MemberKind::Method));
      } else if (head.lexeme == "def-routine") {
        fail(ErrKind::Parse, head.pos,
             "actor behaviours define constructors and methods, not routines");
      } else {
        fail(ErrKind::Parse, head.pos,
             "unknown actor member form '" + head.lexeme + "'");
      }
    }
    expect(TokKind::CloseParen, "end of actor");
    return actor;
  }

  ReactorBehaviourDef parse_reactor() {
    ReactorBehaviourDef reactor;
    const Token& t = peek();
    if (t.kind == TokKind::Identifier) {
      // Short form: (reactor Name (ror Out In...))
      next();
      reactor.name = t.lexeme;
      reactor.pos = t.pos;
      reactor.is_ror = true;
      expect(TokKind::OpenParen, "reactor body");
      const Token& head = expect(TokKind::Identifier, "reactor body form");
      if (head.lexeme != "ror")
        fail(ErrKind::Parse, head.pos,
             "the short reactor form takes a single ror composition as its body");
      reactor.ror_out = expect(TokKind::Identifier, "ror output behaviour").lexeme;
      while (!at_close())
        reactor.ror_inputs.push_back(expect(TokKind::Identifier, "ror input behaviour").lexeme);
      if (reactor.ror_inputs.empty())
        fail(ErrKind::Parse, head.pos, "ror needs at least one input behaviour");
      expect(TokKind::CloseParen, "end of ror");
      expect(TokKind::CloseParen, "end of reactor");
      return reactor;
    }
    expect(TokKind::OpenParen, "reactor signature");
    const Token& name = expect(TokKind::Identifier, "reactor behaviour name");
    reactor.name = name.lexeme;
    reactor.pos = name.pos;
    while (!at_close())
      reactor.params.push_back(expect(TokKind::Identifier, "reactor source parameter").lexeme);
    expect(TokKind::CloseParen, "end of reactor signature");
    while (!at_close()) reactor.body.push_back(parse_expr(BodyCtx::ReactorBody));
    expect(TokKind::CloseParen, "end of reactor");
    return reactor;
  }

  void parse_fields(std::vector<std::string>& fields, SourcePos at) {
    while (!at_close()) {
      const Token& f = expect(TokKind::Identifier, "field name");
      for (const auto& existing : fields)
        if (existing == f.lexeme)
          fail(ErrKind::Parse, f.pos, "duplicate field '" + f.lexeme + "'");
      fields.push_back(f.lexeme);
    }
    if (fields.empty())
      fail(ErrKind::Parse, at, "def-fields needs at least one field name");
    expect(TokKind::CloseParen, "end of def-fields");
  }

  MemberDef parse_member(MemberKind kind) {
    MemberDef m;
    m.kind = kind;
    expect(TokKind::OpenParen, "member signature");
    const Token& sel = expect(TokKind::Identifier, "member selector");
    m.selector = sel.lexeme;
    m.pos = sel.pos;
    while (!at_close()) {
      const Token& p = expect(TokKind::Identifier, "parameter name");
      for (const auto& existing : m.params)
        if (existing == p.lexeme)
          fail(ErrKind::Parse, p.pos, "duplicate parameter '" + p.lexeme + "'");
      m.params.push_back(p.lexeme);
    }
    expect(TokKind::CloseParen, "end of member signature");
    while (!at_close()) m.body.push_back(parse_expr(BodyCtx::Member));
    expect(TokKind::CloseParen, "end of member");
    return m;
  }

  template <typename Members>
  void add_member(Members& members, std::unordered_map<std::string, int>& index,
                  MemberDef m) {
    if (index.count(m.selector))
      fail(ErrKind::Parse, m.pos, "duplicate member '" + m.selector + "'");
    index[m.selector] = static_cast<int>(members.size());
    members.push_back(std::move(m));
  }

  // --- expressions ------------------------------------------------------------

  ExprPtr parse_expr(BodyCtx ctx) {
    const Token& t = next();
    switch (t.kind) {
      case TokKind::Number: {
        auto e = make_expr(ExprKind::Literal, t.pos);
        e->lit = LitKind::Number;
        e->number = t.number;
        return e;
      }
      case TokKind::StringLit: {
        auto e = make_expr(ExprKind::Literal, t.pos);
        e->lit = LitKind::String;
        e->text = t.lexeme;
        return e;
      }
      case TokKind::SymbolLit: {
        auto e = make_expr(ExprKind::Literal, t.pos);
        e->lit = LitKind::Symbol;
        e->text = t.lexeme;
        return e;
      }
      case TokKind::HashConstant:
        return parse_hash_constant(t);
      case TokKind::Identifier: {
        auto e = make_expr(ExprKind::Var, t.pos);
        e->name = t.lexeme;
        return e;
      }
      case TokKind::QualifiedIdentifier: {
        auto e = make_expr(ExprKind::Qualify, t.pos);
        size_t dot = t.lexeme.find('.');
        e->name = t.lexeme.substr(0, dot);
        e->aux = t.lexeme.substr(dot + 1);
        return e;
      }
      case TokKind::OpenParen:
        return parse_form(t.pos, ctx);
      case TokKind::CloseParen:
        fail(ErrKind::Parse, t.pos, "unexpected ')'");
    }
    fail(ErrKind::Parse, t.pos, "unexpected token");
  }

  ExprPtr parse_hash_constant(const Token& t) {
    if (t.lexeme == "self") return make_expr(ExprKind::SelfRef, t.pos);
    auto e = make_expr(ExprKind::Literal, t.pos);
    if (t.lexeme == "true") {
      e->lit = LitKind::True;
    } else if (t.lexeme == "false") {
      e->lit = LitKind::False;
    } else if (t.lexeme == "undefined") {
      e->lit = LitKind::Undefined;
    } else { // Pi
      e->lit = LitKind::Number;
      e->number = std::numbers::pi;
    }
    return e;
  }

  ExprPtr parse_form(SourcePos pos, BodyCtx ctx) {
    const Token& head = peek();
    if (head.kind != TokKind::Identifier)
      fail(ErrKind::Parse, head.pos, "expected a selector or special form name");
    next();
    const std::string& h = head.lexeme;

    if (h == "def") return parse_def(pos, ctx);
    if (h == "def-values") return parse_def_values(pos, ctx);
    if (h == "set!") return parse_set(pos, ctx);
    if (h == "if") return parse_if(pos, ctx);
    if (h == "cond") return parse_cond(pos, ctx);
    if (h == "new") return parse_new(pos, ctx);
    if (h == "spawn-actor") return parse_spawn_actor(pos, ctx);
    if (h == "spawn-reactor") return parse_spawn_reactor(pos);
    if (h == "send") return parse_nary(ExprKind::Send, pos, ctx, 2);
    if (h == "emit") return parse_emit(pos, ctx);
    if (h == "monitor") return parse_nary(ExprKind::Monitor, pos, ctx, 2, 2);
    if (h == "react-to") return parse_nary(ExprKind::ReactTo, pos, ctx, 2);
    if (h == "tick") return parse_tick(pos, ctx);
    if (h == "ror")
      fail(ErrKind::Parse, pos,
           "ror is only legal as the whole body of the short reactor form");
    if (h == "out") return parse_out(pos, ctx);
    if (h == "class" || h == "actor" || h == "reactor" || h == "def-fields" ||
        h == "def-stream" || h == "def-constructor" || h == "def-method" ||
        h == "def-routine")
      fail(ErrKind::Parse, pos, "'" + h + "' is not valid in expression position");

    // Plain invocation: (selector receiver args...)
    auto e = make_expr(ExprKind::Invoke, pos);
    e->name = h;
    if (at_close())
      fail(ErrKind::Parse, pos, "invocation of '" + h + "' needs a receiver");
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of invocation");
    return e;
  }

  ExprPtr parse_def(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::Def, pos);
    e->name = expect(TokKind::Identifier, "def name").lexeme;
    e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of def");
    return e;
  }

  ExprPtr parse_def_values(SourcePos pos, BodyCtx ctx) {
    if (ctx != BodyCtx::ReactorBody)
      fail(ErrKind::Parse, pos, "def-values is only legal in reactor bodies");
    auto e = make_expr(ExprKind::DefValues, pos);
    expect(TokKind::OpenParen, "def-values name list");
    while (!at_close())
      e->names.push_back(expect(TokKind::Identifier, "def-values name").lexeme);
    if (e->names.empty())
      fail(ErrKind::Parse, pos, "def-values needs at least one name");
    expect(TokKind::CloseParen, "end of def-values name list");
    e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of def-values");
    return e;
  }

  ExprPtr parse_set(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::Set, pos);
    e->name = expect(TokKind::Identifier, "set! target").lexeme;
    e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of set!");
    return e;
  }

  ExprPtr parse_if(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::If, pos);
    e->kids.push_back(parse_expr(ctx)); // condition
    e->kids.push_back(parse_expr(ctx)); // then
    if (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of if");
    return e;
  }

  ExprPtr parse_cond(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::Cond, pos);
    bool saw_else = false;
    while (!at_close()) {
      const Token& open = expect(TokKind::OpenParen, "cond arm");
      if (saw_else)
        fail(ErrKind::Parse, open.pos, "cond else arm must be last");
      CondArm arm;
      if (peek().kind == TokKind::Identifier && peek().lexeme == "else") {
        next();
        saw_else = true;
      } else {
        arm.test = parse_expr(ctx);
      }
      while (!at_close()) arm.body.push_back(parse_expr(ctx));
      if (arm.body.empty())
        fail(ErrKind::Parse, open.pos, "cond arm needs a body");
      expect(TokKind::CloseParen, "end of cond arm");
      e->arms.push_back(std::move(arm));
    }
    if (e->arms.empty()) fail(ErrKind::Parse, pos, "cond needs at least one arm");
    expect(TokKind::CloseParen, "end of cond");
    return e;
  }

  ExprPtr parse_new(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::New, pos);
    e->name = expect(TokKind::Identifier, "class name").lexeme;
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of new");
    return e;
  }

  ExprPtr parse_spawn_actor(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::SpawnActor, pos);
    e->name = expect(TokKind::Identifier, "actor behaviour name").lexeme;
    if (at_close())
      fail(ErrKind::Parse, pos, "spawn-actor needs a constructor symbol");
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of spawn-actor");
    return e;
  }

  ExprPtr parse_spawn_reactor(SourcePos pos) {
    auto e = make_expr(ExprKind::SpawnReactor, pos);
    e->name = expect(TokKind::Identifier, "reactor behaviour name").lexeme;
    expect(TokKind::CloseParen, "end of spawn-reactor");
    return e;
  }

  ExprPtr parse_emit(SourcePos pos, BodyCtx ctx) {
    auto e = make_expr(ExprKind::Emit, pos);
    e->name = expect(TokKind::Identifier, "stream name").lexeme;
    if (at_close()) fail(ErrKind::Parse, pos, "emit needs at least one value");
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of emit");
    return e;
  }

  ExprPtr parse_tick(SourcePos pos, BodyCtx ctx) {
    if (ctx != BodyCtx::ReactorBody)
      fail(ErrKind::Parse, pos, "tick is only legal inside reactor bodies");
    auto e = make_expr(ExprKind::Tick, pos);
    e->name = expect(TokKind::Identifier, "tick behaviour name").lexeme;
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    expect(TokKind::CloseParen, "end of tick");
    return e;
  }

  ExprPtr parse_out(SourcePos pos, BodyCtx ctx) {
    if (ctx != BodyCtx::ReactorBody)
      fail(ErrKind::Parse, pos, "out is only legal inside reactor bodies");
    auto e = make_expr(ExprKind::Out, pos);
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    if (e->kids.empty()) fail(ErrKind::Parse, pos, "out needs at least one value");
    expect(TokKind::CloseParen, "end of out");
    return e;
  }

  ExprPtr parse_nary(ExprKind kind, SourcePos pos, BodyCtx ctx, size_t min_kids,
                     size_t max_kids = SIZE_MAX) {
    auto e = make_expr(kind, pos);
    while (!at_close()) e->kids.push_back(parse_expr(ctx));
    if (e->kids.size() < min_kids || e->kids.size() > max_kids)
      fail(ErrKind::Parse, pos, "wrong number of operands");
    expect(TokKind::CloseParen, "end of form");
    return e;
  }

  // --- program validation -----------------------------------------------------

  void validate(const ProgramDef& prog) {
    std::unordered_set<std::string> seen;
    for (const auto& c : prog.classes) {
      if (is_builtin_class_name(c.name))
        fail(ErrKind::Parse, c.pos, "class name '" + c.name + "' is built in");
      if (!seen.insert("c:" + c.name).second)
        fail(ErrKind::Parse, c.pos, "duplicate class '" + c.name + "'");
    }
    for (const auto& a : prog.actors)
      if (!seen.insert("a:" + a.name).second)
        fail(ErrKind::Parse, a.pos, "duplicate actor behaviour '" + a.name + "'");
    for (const auto& r : prog.reactors) {
      if (!seen.insert("r:" + r.name).second)
        fail(ErrKind::Parse, r.pos, "duplicate reactor behaviour '" + r.name + "'");
      if (!r.is_ror) {
        std::unordered_set<std::string> params;
        for (const auto& p : r.params)
          if (!params.insert(p).second)
            fail(ErrKind::Parse, r.pos,
                 "duplicate source parameter '" + p + "' in reactor " + r.name);
      }
    }

    const ActorBehaviourDef* main = prog.find_actor("Main");
    if (!main) fail(ErrKind::Parse, SourcePos{}, "program needs a Main actor behaviour");
    const MemberDef* start = main->find_member("start");
    if (!start || start->kind != MemberKind::Constructor)
      fail(ErrKind::Parse, main->pos, "Main needs a constructor named start");
    if (!start->params.empty())
      fail(ErrKind::Parse, start->pos, "the start constructor takes no arguments");
  }

  static bool is_builtin_class_name(const std::string& n) {
    return n == "Boolean" || n == "Number" || n == "String" || n == "Symbol" ||
           n == "Undefined" || n == "Random" || n == "ActorReference" ||
           n == "ReactorReference" || n == "Stream";
  }
};

} // namespace

ProgramDef parse_program(std::vector<Token> tokens) {
  return Parser(std::move(tokens)).parse();
}

ProgramDef parse_source(std::string_view source) {
  return parse_program(tokenize(source));
}

namespace {

const char* forbidden_form_name(ExprKind k) {
  switch (k) {
    case ExprKind::Set: return "set!";
    case ExprKind::SpawnActor: return "spawn-actor";
    case ExprKind::SpawnReactor: return "spawn-reactor";
    case ExprKind::Send: return "send";
    case ExprKind::Emit: return "emit";
    case ExprKind::Monitor: return "monitor";
    case ExprKind::ReactTo: return "react-to";
    default: return nullptr;
  }
}

void walk_purity(const Expr& e, PurityContext ctx) {
  if (const char* name = forbidden_form_name(e.kind)) {
    const char* where = ctx == PurityContext::Routine ? "a routine" : "a reactor body";
    fail(ErrKind::Purity, e.pos,
         std::string(name) + " is not allowed in " + where);
  }
  for (const auto& kid : e.kids)
    if (kid) walk_purity(*kid, ctx);
  for (const auto& arm : e.arms) {
    if (arm.test) walk_purity(*arm.test, ctx);
    for (const auto& b : arm.body) walk_purity(*b, ctx);
  }
}

} // namespace

void check_purity(const Expr& body, PurityContext ctx) { walk_purity(body, ctx); }

void check_program_purity(const ProgramDef& program) {
  for (const auto& cls : program.classes)
    for (const auto& m : cls.members)
      if (m.kind == MemberKind::Routine)
        for (const auto& e : m.body) check_purity(*e, PurityContext::Routine);
  for (const auto& r : program.reactors)
    for (const auto& e : r.body) check_purity(*e, PurityContext::ReactorBody);
}

} // namespace arlang
