#include <doctest.h>

#include <random>

#include "eval.hpp"
#include "program.hpp"
#include "support.hpp"

using namespace arlang;

namespace {

const char* kPairProgram = R"((class Pair
  (def-fields car cdr)
  (def-constructor (initialize-with initial-car initial-cdr)
    (set! car initial-car)
    (set! cdr initial-cdr))
  (def-routine (first) car)
  (def-routine (second) cdr)
  (def-method (set-first! new-car) (set! car new-car))
  (def-method (set-second! new-cdr) (set! cdr new-cdr))
  (def-routine (length)
    (cond ((eq? cdr #undefined) 1)
          ((eq? (type-of cdr) 'Pair) (+ 1 (length cdr)))
          (else 2))))
(actor Main (def-constructor (start) #undefined)))";

struct PairFixture {
  std::unique_ptr<Program> program = Program::load(kPairProgram);
  GuardStack guard;
  Activation actor_act;   // impure context, like an actor turn
  Activation routine_act; // pure context

  PairFixture() {
    actor_act.kind = ActKind::Method;
    actor_act.pure = false;
    routine_act.kind = ActKind::Routine;
    routine_act.pure = true;
  }

  EvalContext cx() { return EvalContext{*program, nullptr, nullptr, &guard}; }

  Value make_pair(Value car, Value cdr) {
    auto c = cx();
    return instantiate("Pair", "initialize-with", {std::move(car), std::move(cdr)},
                       actor_act, c, SourcePos{});
  }

  // Proper cdr-linked list of n pairs: (n, (n-1, ... (1, #undefined))).
  Value make_list(int n) {
    Value list = Value::undefined();
    for (int i = 1; i <= n; i++) list = make_pair(Value::number(i), list);
    return list;
  }
};

} // namespace

TEST_CASE("instantiate runs the constructor over fresh undefined fields") {
  PairFixture f;
  Value p = f.make_pair(Value::number(1), Value::number(2));
  REQUIRE(p.kind() == ValueKind::Instance);
  CHECK(p.as_instance()->fields[0].as_number() == 1);
  CHECK(p.as_instance()->fields[1].as_number() == 2);

  Value q = f.make_pair(Value::undefined(), Value::undefined());
  CHECK(q.as_instance()->fields[0].is_undefined());
  CHECK(q.as_instance()->fields[1].is_undefined());

  auto c = f.cx();
  CHECK_THROWS_AS(
      instantiate("Pair", "no-such-ctor", {}, f.actor_act, c, SourcePos{}), Error);
  CHECK_THROWS_AS(instantiate("Nope", "init", {}, f.actor_act, c, SourcePos{}), Error);
  // arity mismatch
  CHECK_THROWS_AS(
      instantiate("Pair", "initialize-with", {Value::number(1)}, f.actor_act, c,
                  SourcePos{}),
      Error);
}

TEST_CASE("lookup_member classifies members and rejects unknown selectors") {
  PairFixture f;
  Value p = f.make_pair(Value::number(1), Value::number(2));
  ResolvedMember m;
  REQUIRE(lookup_member(*f.program, p, "length", &m));
  CHECK(m.kind == MemberKind::Routine);
  REQUIRE(lookup_member(*f.program, p, "set-first!", &m));
  CHECK(m.kind == MemberKind::Method);
  REQUIRE(lookup_member(*f.program, p, "initialize-with", &m));
  CHECK(m.kind == MemberKind::Constructor);
  CHECK_FALSE(lookup_member(*f.program, p, "frobnicate", &m));
  // universal routines resolve on every value
  REQUIRE(lookup_member(*f.program, Value::number(3), "type-of", &m));
  CHECK(m.kind == MemberKind::Routine);
  REQUIRE(lookup_member(*f.program, Value::string("x"), "println", &m));
  CHECK(m.kind == MemberKind::Method);
}

TEST_CASE("type_of names") {
  PairFixture f;
  Value p = f.make_pair(Value::number(1), Value::number(2));
  CHECK(type_name(p) == "Pair");
  CHECK(type_name(Value::number(3)) == "Number");
  CHECK(type_name(Value::string("s")) == "String");
  CHECK(type_name(Value::symbol("s")) == "Symbol");
  CHECK(type_name(Value::boolean(true)) == "Boolean");
  CHECK(type_name(Value::undefined()) == "Undefined");
  CHECK(type_name(Value::actor_ref(1)) == "ActorReference");
  CHECK(type_name(Value::reactor_ref(1)) == "ReactorReference");
  CHECK(type_name(Value::stream_ref({1, false, "speed", 1})) == "Stream");
}

TEST_CASE("equals is structural, ref_equals is identity") {
  PairFixture f;
  CHECK(equals(Value::string("Hey"), Value::string("Hey")));
  CHECK_FALSE(equals(Value::string("Hey"), Value::string("Ho")));
  Value p = f.make_pair(Value::number(1), Value::number(2));
  Value q = f.make_pair(Value::number(1), Value::number(2));
  CHECK(ref_equals(p, p));
  CHECK(equals(p, q));
  CHECK_FALSE(ref_equals(p, q));
  CHECK_FALSE(equals(p, f.make_pair(Value::number(1), Value::number(3))));
}

TEST_CASE("equals terminates on cyclic structures") {
  PairFixture f;
  Value a = f.make_pair(Value::number(1), Value::undefined());
  a.as_instance()->fields[1] = a;
  Value b = f.make_pair(Value::number(1), Value::undefined());
  b.as_instance()->fields[1] = b;
  CHECK(equals(a, b));
  Value c = f.make_pair(Value::number(2), Value::undefined());
  c.as_instance()->fields[1] = c;
  CHECK_FALSE(equals(a, c));
}

TEST_CASE("deep_copy preserves structure, sharing and cycles") {
  PairFixture f;
  CHECK(deep_copy(Value::number(42)).as_number() == 42);

  Value shared = f.make_pair(Value::number(7), Value::undefined());
  Value root = f.make_pair(shared, shared);
  Value copy = deep_copy(root);
  CHECK(equals(root, copy));
  CHECK_FALSE(ref_equals(root, copy));
  // sharing preserved: both fields are the same copied instance
  CHECK(copy.as_instance()->fields[0].as_instance().get() ==
        copy.as_instance()->fields[1].as_instance().get());
  CHECK(copy.as_instance()->fields[0].as_instance().get() != shared.as_instance().get());

  Value cyc = f.make_pair(Value::number(1), Value::undefined());
  cyc.as_instance()->fields[1] = cyc;
  Value cyc2 = deep_copy(cyc);
  CHECK_FALSE(ref_equals(cyc, cyc2));
  CHECK(cyc2.as_instance()->fields[1].as_instance().get() == cyc2.as_instance().get());

  // references are copied as designations
  Value ref = Value::actor_ref(3);
  CHECK(ref_equals(deep_copy(ref), ref));
}

TEST_CASE("size measure") {
  PairFixture f;
  CHECK(size_of(Value::number(-7)) == 7);
  CHECK(size_of(Value::undefined()) == 0);
  CHECK(size_of(Value::string("abcd")) == 4);
  CHECK(size_of(Value::symbol("s")) == 0);
  CHECK(size_of(Value::actor_ref(1)) == 0);

  Value list3 = f.make_list(3);
  CHECK(size_of(list3) == 3);
  CHECK(size_of(list3.as_instance()->fields[1]) == 2);

  // cycle-safe
  Value cyc = f.make_pair(Value::number(1), Value::undefined());
  cyc.as_instance()->fields[1] = cyc;
  CHECK(size_of(cyc) == 1);
}

namespace {

// Independent oracle: count distinct reachable instances by recursive
// enumeration over a visited set.
void collect(const Value& v, std::vector<const Instance*>& seen) {
  if (v.kind() != ValueKind::Instance) return;
  const Instance* inst = v.as_instance().get();
  for (const Instance* s : seen)
    if (s == inst) return;
  seen.push_back(inst);
  for (const auto& field : inst->fields) collect(field, seen);
}

Value random_value(PairFixture& f, std::mt19937& gen, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 3);
  switch (pick(gen)) {
    case 0: return Value::number(std::uniform_int_distribution<int>(-50, 50)(gen));
    case 1: return Value::string(std::string(gen() % 5, 'x'));
    case 2: return Value::boolean(gen() % 2 == 0);
    case 3: return Value::undefined();
    default:
      return f.make_pair(random_value(f, gen, depth - 1), random_value(f, gen, depth - 1));
  }
}

} // namespace

TEST_CASE("properties: deep_copy equals the original and keeps its size") {
  PairFixture f;
  std::mt19937 gen(20240811);
  for (int i = 0; i < 200; i++) {
    Value v = random_value(f, gen, 4);
    Value c = deep_copy(v);
    CHECK(equals(v, c));
    CHECK(size_of(v) == size_of(c));
    if (v.kind() == ValueKind::Instance) CHECK_FALSE(ref_equals(v, c));
    std::vector<const Instance*> seen;
    collect(v, seen);
    double oracle = v.kind() == ValueKind::Instance ? double(seen.size())
                    : v.kind() == ValueKind::Number ? std::abs(v.as_number())
                    : v.kind() == ValueKind::String ? double(v.as_string().size())
                                                    : 0.0;
    CHECK(size_of(v) == oracle);
  }
}

TEST_CASE("proper list sizes descend strictly") {
  PairFixture f;
  for (int n = 2; n <= 12; n++) {
    Value list = f.make_list(n);
    CHECK(size_of(list) == n);
    CHECK(size_of(list.as_instance()->fields[1]) == n - 1);
  }
}
