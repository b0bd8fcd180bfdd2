#include "eval.hpp"

#include <cmath>

#include "program.hpp"
#include "runtime.hpp"

namespace arlang {

namespace {

[[noreturn]] void runtime_fail(SourcePos pos, std::string msg) {
  fail(ErrKind::Runtime, pos, std::move(msg));
}

double want_number(const Value& v, SourcePos pos, const char* who) {
  if (!v.is_number())
    runtime_fail(pos, std::string(who) + " expects a number, got " +
                          value_kind_name(v.kind()));
  return v.as_number();
}

// --- builtin members ---------------------------------------------------------

Value bi_arith_add(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  double acc = want_number(recv, pos, "+");
  for (auto& a : args) acc += want_number(a, pos, "+");
  return Value::number(acc);
}

Value bi_arith_sub(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  double acc = want_number(recv, pos, "-");
  for (auto& a : args) acc -= want_number(a, pos, "-");
  return Value::number(acc);
}

Value bi_arith_mul(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  double acc = want_number(recv, pos, "*");
  for (auto& a : args) acc *= want_number(a, pos, "*");
  return Value::number(acc);
}

Value bi_arith_div(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  double acc = want_number(recv, pos, "/");
  for (auto& a : args) acc /= want_number(a, pos, "/");
  return Value::number(acc);
}

Value bi_expt(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  return Value::number(std::pow(want_number(recv, pos, "expt"),
                                want_number(args[0], pos, "expt")));
}

Value bi_round(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  (void)args;
  return Value::number(std::round(want_number(recv, pos, "round")));
}

Value bi_lt(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  return Value::boolean(want_number(recv, pos, "<") < want_number(args[0], pos, "<"));
}
Value bi_gt(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  return Value::boolean(want_number(recv, pos, ">") > want_number(args[0], pos, ">"));
}
Value bi_le(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  return Value::boolean(want_number(recv, pos, "<=") <= want_number(args[0], pos, "<="));
}
Value bi_ge(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  return Value::boolean(want_number(recv, pos, ">=") >= want_number(args[0], pos, ">="));
}

Value bi_type_of(EvalContext&, const Value& recv, std::vector<Value>&, SourcePos) {
  return Value::symbol(type_name(recv));
}

Value bi_equal(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos) {
  return Value::boolean(equals(recv, args[0]));
}

Value bi_eq(EvalContext&, const Value& recv, std::vector<Value>& args, SourcePos) {
  return Value::boolean(ref_equals(recv, args[0]));
}

Value bi_println(EvalContext& cx, const Value& recv, std::vector<Value>& args, SourcePos pos) {
  if (!cx.runtime) runtime_fail(pos, "println outside a running program");
  std::string line = display(recv);
  for (const auto& a : args) line += display(a);
  cx.runtime->write_line(line);
  return Value::undefined();
}

Value bi_sleep(EvalContext& cx, const Value& recv, std::vector<Value>&, SourcePos pos) {
  if (!cx.runtime || !cx.process) runtime_fail(pos, "sleep outside a running actor");
  double ms = want_number(recv, pos, "sleep");
  if (ms < 0) runtime_fail(pos, "sleep needs a non-negative duration");
  cx.runtime->sleep_for(*cx.process, ms);
  return Value::undefined();
}

Value bi_integer_between(EvalContext& cx, const Value&, std::vector<Value>& args, SourcePos pos) {
  if (!cx.runtime) runtime_fail(pos, "integer-between outside a running program");
  double lo = want_number(args[0], pos, "integer-between");
  double hi = want_number(args[1], pos, "integer-between");
  return Value::number(cx.runtime->random_integer_between(lo, hi, pos));
}

struct BuiltinEntry {
  const char* selector;
  BuiltinMember member;
};

const BuiltinEntry kNumberMembers[] = {
    {"+", {MemberKind::Routine, 1, -1, bi_arith_add}},
    {"-", {MemberKind::Routine, 1, -1, bi_arith_sub}},
    {"*", {MemberKind::Routine, 1, -1, bi_arith_mul}},
    {"/", {MemberKind::Routine, 1, -1, bi_arith_div}},
    {"expt", {MemberKind::Routine, 1, 1, bi_expt}},
    {"round", {MemberKind::Routine, 0, 0, bi_round}},
    {"<", {MemberKind::Routine, 1, 1, bi_lt}},
    {">", {MemberKind::Routine, 1, 1, bi_gt}},
    {"<=", {MemberKind::Routine, 1, 1, bi_le}},
    {">=", {MemberKind::Routine, 1, 1, bi_ge}},
    {"sleep", {MemberKind::Method, 0, 0, bi_sleep}},
};

const BuiltinEntry kStringMembers[] = {
    {"println", {MemberKind::Method, 0, -1, bi_println}},
};

const BuiltinEntry kRandomMembers[] = {
    {"integer-between", {MemberKind::Method, 2, 2, bi_integer_between}},
};

const BuiltinEntry kUniversalMembers[] = {
    {"type-of", {MemberKind::Routine, 0, 0, bi_type_of}},
    {"equal?", {MemberKind::Routine, 1, 1, bi_equal}},
    {"eq?", {MemberKind::Routine, 1, 1, bi_eq}},
};

const BuiltinMember* find_in(const BuiltinEntry* table, size_t n, const std::string& sel) {
  for (size_t i = 0; i < n; i++)
    if (sel == table[i].selector) return &table[i].member;
  return nullptr;
}

const BuiltinMember* builtin_for(const Value& receiver, const std::string& selector) {
  const BuiltinMember* m = nullptr;
  switch (receiver.kind()) {
    case ValueKind::Number:
      m = find_in(kNumberMembers, std::size(kNumberMembers), selector);
      break;
    case ValueKind::String:
      m = find_in(kStringMembers, std::size(kStringMembers), selector);
      break;
    case ValueKind::Instance:
      if (receiver.as_instance()->cls->builtin &&
          receiver.as_instance()->cls->name == "Random")
        m = find_in(kRandomMembers, std::size(kRandomMembers), selector);
      break;
    default:
      break;
  }
  if (!m) m = find_in(kUniversalMembers, std::size(kUniversalMembers), selector);
  return m;
}

} // namespace

bool lookup_member(const Program& program, const Value& receiver,
                   const std::string& selector, ResolvedMember* out) {
  (void)program;
  if (receiver.kind() == ValueKind::Instance) {
    const ClassDef* cls = receiver.as_instance()->cls;
    if (const MemberDef* m = cls->find_member(selector)) {
      out->kind = m->kind;
      out->user = m;
      out->builtin = nullptr;
      out->class_name = cls->name;
      return true;
    }
  }
  if (const BuiltinMember* b = builtin_for(receiver, selector)) {
    out->kind = b->kind;
    out->user = nullptr;
    out->builtin = b;
    out->class_name = type_name(receiver);
    return true;
  }
  return false;
}

namespace {

void check_arity(size_t got, int min_args, int max_args, const std::string& selector,
                 SourcePos pos) {
  bool ok = got >= static_cast<size_t>(min_args) &&
            (max_args < 0 || got <= static_cast<size_t>(max_args));
  if (!ok)
    runtime_fail(pos, "'" + selector + "' called with " + std::to_string(got) +
                          " argument(s)");
}

GuardFrame make_guard_frame(const std::string& class_name, const std::string& selector,
                            const Value& receiver, const std::vector<Value>& args) {
  GuardFrame f;
  f.class_name = class_name;
  f.selector = selector;
  f.sizes.reserve(args.size() + 1);
  f.sizes.push_back(size_of(receiver));
  for (const auto& a : args) f.sizes.push_back(size_of(a));
  return f;
}

Value run_user_member(const MemberDef& member, const std::string& class_name,
                      const Value& receiver, std::vector<Value>& args,
                      Activation& caller, bool pure, EvalContext& cx, SourcePos pos) {
  if (args.size() != member.params.size())
    runtime_fail(pos, class_name + "." + member.selector + " expects " +
                          std::to_string(member.params.size()) + " argument(s), got " +
                          std::to_string(args.size()));
  Activation act;
  act.kind = member.kind == MemberKind::Routine     ? ActKind::Routine
             : member.kind == MemberKind::Constructor ? ActKind::Constructor
                                                      : ActKind::Method;
  act.pure = pure;
  act.class_name = class_name;
  act.selector = member.selector;
  act.receiver = receiver;
  if (receiver.kind() == ValueKind::Instance) {
    Instance* inst = receiver.as_instance().get();
    act.fields = &inst->fields;
    act.field_names = &inst->cls->fields;
  }
  act.parent = &caller;
  act.call_pos = pos;

  Scope scope;
  for (size_t i = 0; i < member.params.size(); i++)
    scope.define(member.params[i], std::move(args[i]));
  return eval_body(member.body, scope, act, cx);
}

} // namespace

Value invoke(const Value& receiver, const std::string& selector,
             std::vector<Value> args, Activation& caller, EvalContext& cx,
             SourcePos pos) {
  ResolvedMember member;
  if (!lookup_member(cx.program, receiver, selector, &member))
    runtime_fail(pos, "unknown selector '" + selector + "' on " + type_name(receiver));

  if (member.kind == MemberKind::Method && caller.pure)
    fail(ErrKind::MethodFromPureContext, pos,
         "'" + selector + "' is a method of " + member.class_name +
             " and cannot be called from a routine or reactor");
  if (member.kind == MemberKind::Constructor)
    runtime_fail(pos, "constructor '" + selector + "' can only be invoked through new");

  if (member.builtin) {
    check_arity(args.size(), member.builtin->min_args, member.builtin->max_args,
                selector, pos);
    return member.builtin->fn(cx, receiver, args, pos);
  }

  bool pure = caller.pure || member.kind == MemberKind::Routine;
  if (member.kind == MemberKind::Routine && cx.guard) {
    GuardScope guard(*cx.guard, make_guard_frame(member.class_name, selector, receiver, args),
                     pos);
    return run_user_member(*member.user, member.class_name, receiver, args, caller,
                           pure, cx, pos);
  }
  return run_user_member(*member.user, member.class_name, receiver, args, caller, pure,
                         cx, pos);
}

Value instantiate(const std::string& class_name, const std::string& ctor,
                  std::vector<Value> args, Activation& caller, EvalContext& cx,
                  SourcePos pos) {
  const ClassDef* cls = cx.program.defs.find_class(class_name);
  if (!cls) {
    // Random is built in: (new Random) takes no constructor symbol.
    if (class_name == "Random") {
      if (!ctor.empty())
        runtime_fail(pos, "Random has no constructor '" + ctor + "'");
      if (!args.empty()) runtime_fail(pos, "new Random takes no arguments");
      return Value::instance(make_instance(&cx.program.random_class));
    }
    runtime_fail(pos, "unknown class '" + class_name + "'");
  }
  if (ctor.empty())
    runtime_fail(pos, "new " + class_name + " needs a constructor symbol");
  const MemberDef* member = cls->find_member(ctor);
  if (!member || member->kind != MemberKind::Constructor)
    runtime_fail(pos, "unknown constructor '" + ctor + "' on class " + class_name);

  Value inst = Value::instance(make_instance(cls));
  // In pure contexts the constructor runs guarded like a routine: a fresh
  // instance never escapes before the constructor returns, but unbounded
  // constructor recursion must still be caught.
  if (caller.pure && cx.guard) {
    GuardScope guard(*cx.guard, make_guard_frame(class_name, ctor, inst, args), pos);
    run_user_member(*member, class_name, inst, args, caller, caller.pure, cx, pos);
  } else {
    run_user_member(*member, class_name, inst, args, caller, caller.pure, cx, pos);
  }
  return inst;
}

namespace {

struct DepthScope {
  EvalContext& cx;
  explicit DepthScope(EvalContext& c, SourcePos pos) : cx(c) {
    if (++cx.depth > cx.max_depth)
      runtime_fail(pos, "evaluation depth exceeded (" + std::to_string(cx.max_depth) + ")");
  }
  ~DepthScope() { cx.depth--; }
};

Value literal_value(const Expr& e) {
  switch (e.lit) {
    case LitKind::Number: return Value::number(e.number);
    case LitKind::String: return Value::string(e.text);
    case LitKind::Symbol: return Value::symbol(e.text);
    case LitKind::True: return Value::boolean(true);
    case LitKind::False: return Value::boolean(false);
    case LitKind::Undefined: return Value::undefined();
  }
  return Value::undefined();
}

std::string want_symbol(const Value& v, SourcePos pos, const char* who) {
  if (v.kind() != ValueKind::Symbol)
    runtime_fail(pos, std::string(who) + " expects a symbol, got " +
                          value_kind_name(v.kind()));
  return v.as_symbol();
}

void require_effectful(const Expr& e, Activation& act, EvalContext& cx, const char* form) {
  if (act.pure)
    runtime_fail(e.pos, std::string(form) + " is not allowed in a pure context");
  if (!cx.runtime || !cx.process)
    runtime_fail(e.pos, std::string(form) + " outside a running program");
}

Value eval_set(const Expr& e, Scope& scope, Activation& act, EvalContext& cx) {
  Value v = eval(*e.kids[0], scope, act, cx);
  if (Value* local = scope.find(e.name)) {
    if (act.pure && act.kind != ActKind::Constructor)
      fail(ErrKind::Purity, e.pos, "set! is not allowed in a pure context");
    *local = std::move(v);
    return Value::undefined();
  }
  int fi = act.field_index(e.name);
  if (fi >= 0 && act.fields) {
    // Fields of the object under construction may be assigned even in pure
    // contexts; the instance has not escaped yet.
    if (act.pure && act.kind != ActKind::Constructor)
      fail(ErrKind::Purity, e.pos, "set! is not allowed in a pure context");
    (*act.fields)[fi] = std::move(v);
    return Value::undefined();
  }
  runtime_fail(e.pos, "set! of unbound identifier '" + e.name + "'");
}

Value eval_var(const Expr& e, Scope& scope, Activation& act, EvalContext&) {
  if (Value* local = scope.find(e.name)) return *local;
  int fi = act.field_index(e.name);
  if (fi >= 0 && act.fields) return (*act.fields)[fi];
  runtime_fail(e.pos, "unbound identifier '" + e.name + "'");
}

Value eval_new(const Expr& e, Scope& scope, Activation& act, EvalContext& cx) {
  std::string ctor;
  std::vector<Value> args;
  if (!e.kids.empty()) {
    ctor = want_symbol(eval(*e.kids[0], scope, act, cx), e.pos, "new");
    for (size_t i = 1; i < e.kids.size(); i++)
      args.push_back(eval(*e.kids[i], scope, act, cx));
  }
  return instantiate(e.name, ctor, std::move(args), act, cx, e.pos);
}

Value eval_invoke(const Expr& e, Scope& scope, Activation& act, EvalContext& cx) {
  Value receiver = eval(*e.kids[0], scope, act, cx);
  std::vector<Value> args;
  args.reserve(e.kids.size() - 1);
  for (size_t i = 1; i < e.kids.size(); i++)
    args.push_back(eval(*e.kids[i], scope, act, cx));
  return invoke(receiver, e.name, std::move(args), act, cx, e.pos);
}

} // namespace

Value eval_body(const std::vector<ExprPtr>& body, Scope& scope, Activation& act,
                EvalContext& cx) {
  Value result;
  for (const auto& e : body) result = eval(*e, scope, act, cx);
  return result;
}

Value eval(const Expr& e, Scope& scope, Activation& act, EvalContext& cx) {
  DepthScope depth(cx, e.pos);
  switch (e.kind) {
    case ExprKind::Literal:
      return literal_value(e);
    case ExprKind::Var:
      return eval_var(e, scope, act, cx);
    case ExprKind::SelfRef:
      if (act.pure || !cx.process || cx.process->is_reactor)
        runtime_fail(e.pos, "#self outside an actor");
      return Value::actor_ref(cx.process->pid);
    case ExprKind::Qualify: {
      Expr owner_ref;
      owner_ref.kind = ExprKind::Var;
      owner_ref.pos = e.pos;
      owner_ref.name = e.name;
      Value owner = eval_var(owner_ref, scope, act, cx);
      if (!cx.runtime)
        runtime_fail(e.pos, "qualification outside a running program");
      return Value::stream_ref(cx.runtime->make_stream_ref(owner, e.aux, e.pos));
    }
    case ExprKind::Def: {
      if (scope.find(e.name))
        runtime_fail(e.pos, "def would shadow existing binding '" + e.name + "'");
      Value v = eval(*e.kids[0], scope, act, cx);
      scope.define(e.name, std::move(v));
      return Value::undefined();
    }
    case ExprKind::Set:
      return eval_set(e, scope, act, cx);
    case ExprKind::If: {
      if (eval(*e.kids[0], scope, act, cx).truthy()) return eval(*e.kids[1], scope, act, cx);
      if (e.kids.size() > 2) return eval(*e.kids[2], scope, act, cx);
      return Value::undefined();
    }
    case ExprKind::Cond: {
      for (const auto& arm : e.arms) {
        bool taken = !arm.test || eval(*arm.test, scope, act, cx).truthy();
        if (taken) {
          Scope arm_scope;
          arm_scope.parent = &scope;
          return eval_body(arm.body, arm_scope, act, cx);
        }
      }
      return Value::undefined();
    }
    case ExprKind::New:
      return eval_new(e, scope, act, cx);
    case ExprKind::Invoke:
      return eval_invoke(e, scope, act, cx);
    case ExprKind::SpawnActor: {
      require_effectful(e, act, cx, "spawn-actor");
      std::string ctor = want_symbol(eval(*e.kids[0], scope, act, cx), e.pos, "spawn-actor");
      std::vector<Value> args;
      for (size_t i = 1; i < e.kids.size(); i++)
        args.push_back(eval(*e.kids[i], scope, act, cx));
      return cx.runtime->spawn_actor(e.name, ctor, std::move(args), *cx.process, e.pos);
    }
    case ExprKind::SpawnReactor:
      require_effectful(e, act, cx, "spawn-reactor");
      return cx.runtime->spawn_reactor(e.name, *cx.process, e.pos);
    case ExprKind::Send: {
      require_effectful(e, act, cx, "send");
      Value target = eval(*e.kids[0], scope, act, cx);
      std::string selector = want_symbol(eval(*e.kids[1], scope, act, cx), e.pos, "send");
      std::vector<Value> args;
      for (size_t i = 2; i < e.kids.size(); i++)
        args.push_back(eval(*e.kids[i], scope, act, cx));
      cx.runtime->send_invoke(target, selector, std::move(args), *cx.process, e.pos);
      return Value::undefined();
    }
    case ExprKind::Emit: {
      require_effectful(e, act, cx, "emit");
      std::vector<Value> tuple;
      for (const auto& k : e.kids) tuple.push_back(eval(*k, scope, act, cx));
      cx.runtime->emit_stream(*cx.process, e.name, std::move(tuple), e.pos);
      return Value::undefined();
    }
    case ExprKind::Monitor: {
      require_effectful(e, act, cx, "monitor");
      Value stream = eval(*e.kids[0], scope, act, cx);
      if (stream.kind() != ValueKind::StreamRef)
        runtime_fail(e.pos, std::string("monitor expects a stream reference, got ") +
                                value_kind_name(stream.kind()));
      std::string selector = want_symbol(eval(*e.kids[1], scope, act, cx), e.pos, "monitor");
      cx.runtime->monitor_stream(*cx.process, stream.as_stream_ref(), selector, e.pos);
      return Value::undefined();
    }
    case ExprKind::ReactTo: {
      require_effectful(e, act, cx, "react-to");
      Value target = eval(*e.kids[0], scope, act, cx);
      std::vector<Value> args;
      for (size_t i = 1; i < e.kids.size(); i++)
        args.push_back(eval(*e.kids[i], scope, act, cx));
      cx.runtime->react_to(*cx.process, target, std::move(args), e.pos);
      return Value::undefined();
    }
    case ExprKind::Tick:
    case ExprKind::Ror:
    case ExprKind::Out:
    case ExprKind::DefValues:
      runtime_fail(e.pos, "form is only meaningful inside a reactor body");
  }
  runtime_fail(e.pos, "unexpected expression");
}

} // namespace arlang
