#include <doctest.h>

#include "eval.hpp"
#include "program.hpp"
#include "support.hpp"

using namespace arlang;
using testsupport::run_source;

namespace {

std::string main_with(const std::string& body) {
  return "(actor Main (def-constructor (start) " + body + "))";
}

} // namespace

TEST_CASE("basic expression semantics print no") {
  auto r = run_source(testsupport::read_file(
      testsupport::corpus_path("basics.arl")));
  CHECK(r.code == 0);
  CHECK(r.out == "no\n");
}

TEST_CASE("if uses truthiness: #undefined and #false are falsy") {
  auto r = run_source(main_with("(if #undefined (println \"1\") (println \"2\"))"
                                "(if #false (println \"a\") (println \"b\"))"
                                "(if 0 (println \"zero-true\") (println \"zero-false\"))"));
  CHECK(r.out == "2\nb\nzero-true\n");
}

TEST_CASE("cond falls through to else") {
  auto r = run_source(main_with(
      "(if (eq? (cond ((eq? 1 2) 'a) (else 'b)) 'b) (println \"else\") (println \"?\"))"));
  CHECK(r.out == "else\n");
}

TEST_CASE("cond arm bodies run in sequence with their own defs") {
  auto r = run_source(main_with(
      "(println \"\" (cond (#false 'no) (else (def t 1) (+ t 1))))"
      "(def t 9) (println \"\" t)")); // the arm-local t did not leak
  CHECK(r.code == 0);
  CHECK(r.out == "2\n9\n");
}

TEST_CASE("if without else yields undefined") {
  auto r = run_source(main_with("(println \"v=\" (if #false 1))"));
  CHECK(r.out == "v=#undefined\n");
}

TEST_CASE("def scopes to the remainder and cannot shadow") {
  auto r = run_source(main_with("(def x 1) (def y (+ x 1)) (println \"\" y)"));
  CHECK(r.out == "2\n");
  auto shadow = run_source(main_with("(def x 1) (def x 2)"));
  CHECK(shadow.code == 2);
  auto param = run_source(
      "(actor Main (def-constructor (start) (send #self 'm 1))"
      "  (def-method (m p) (def p 2)))");
  CHECK(param.code == 2);
}

TEST_CASE("set! on unbound identifier fails") {
  auto r = run_source(main_with("(set! nope 1)"));
  CHECK(r.code == 2);
  CHECK(r.error.find("unbound") != std::string::npos);
}

TEST_CASE("unbound identifier fails") {
  auto r = run_source(main_with("(println \"\" mystery)"));
  CHECK(r.code == 2);
  CHECK(r.error.find("unbound identifier") != std::string::npos);
}

TEST_CASE("argument evaluation is left-to-right and observable") {
  auto r = run_source(
      "(class Probe (def-method (two a b) #undefined))"
      "(actor Main (def-constructor (start)"
      "  (two (new Probe 'mk) (println \"first\") (println \"second\")))"
      ")"
      "");
  // constructor 'mk does not exist; use a class with a zero-arg ctor instead
  CHECK(r.code == 2);

  auto ok = run_source(
      "(class Probe (def-constructor (mk)) (def-method (two a b) #undefined))"
      "(actor Main (def-constructor (start)"
      "  (two (new Probe 'mk) (println \"first\") (println \"second\"))))");
  CHECK(ok.code == 0);
  CHECK(ok.out == "first\nsecond\n");
}

TEST_CASE("pure fragment evaluates deterministically") {
  auto program = Program::load(
      "(class K (def-routine (f x) (+ x (* x 2))))"
      "(actor Main (def-constructor (start) #undefined))");
  GuardStack guard;
  EvalContext cx{*program, nullptr, nullptr, &guard};
  Activation act;
  act.kind = ActKind::Routine;
  act.pure = true;
  auto c = cx;
  // K has no constructors; both forms of new are rejected
  CHECK_THROWS_AS(instantiate("K", "", {}, act, c, SourcePos{}), Error);
  CHECK_THROWS_AS(instantiate("K", "nope", {}, act, c, SourcePos{}), Error);

  Value a = invoke(Value::number(7), "+", {Value::number(1)}, act, c, SourcePos{});
  Value b = invoke(Value::number(7), "+", {Value::number(1)}, act, c, SourcePos{});
  CHECK(equals(a, b));
  CHECK(a.as_number() == 8);
}

TEST_CASE("routine length walks a proper list") {
  auto r = run_source(testsupport::read_file(
                          testsupport::corpus_path("circular_list.arl")),
                      {});
  // circular list rejected by the termination guard
  CHECK(r.code == 2);
  CHECK(r.error.find("termination violation") != std::string::npos);
}

TEST_CASE("method invocation from a routine context is a run-time error") {
  auto r = run_source(
      "(class C (def-routine (bad) (println \"x\")))"
      "(actor Main (def-constructor (start) (bad (new C 'mk))))");
  CHECK(r.code == 2); // unknown constructor mk

  auto r2 = run_source(
      "(class C (def-constructor (mk)) (def-routine (bad) (println \"x\")))"
      "(actor Main (def-constructor (start) (bad (new C 'mk))))");
  CHECK(r2.code == 2);
  CHECK(r2.error.find("method call from pure context") != std::string::npos);
}

TEST_CASE("println from constructor and method contexts performs IO") {
  auto r = run_source(main_with("(println \"Hello World!\")"));
  CHECK(r.code == 0);
  CHECK(r.out == "Hello World!\n");
}

TEST_CASE("variadic println concatenates receiver and arguments") {
  auto r = run_source(main_with("(println \"a=\" 1 \" b=\" 'sym \" \" #true)"));
  CHECK(r.out == "a=1 b=sym #true\n");
}

TEST_CASE("number formatting is shortest round-trip") {
  auto r = run_source(main_with("(println \"\" 4)(println \"\" 0.5)"
                                "(println \"\" (/ 10 4))(println \"\" (round 3.6945))"));
  CHECK(r.out == "4\n0.5\n2.5\n4\n");
}

TEST_CASE("arithmetic builtins") {
  auto r = run_source(main_with(
      "(println \"\" (+ 1 2) \" \" (- 10 1 2) \" \" (* 2 3 4) \" \" (/ 100 5 2)"
      " \" \" (expt 2 10) \" \" (< 1 2) \" \" (>= 2 2))"));
  CHECK(r.out == "3 7 24 10 1024 #true #true\n");
}

TEST_CASE("arithmetic on non-numbers is a run-time error") {
  auto r = run_source(main_with("(+ 1 \"x\")"));
  CHECK(r.code == 2);
  CHECK(r.error.find("expects a number") != std::string::npos);
}

TEST_CASE("#self outside an actor context fails") {
  auto r = run_source(
      "(class C (def-routine (me) #self))"
      "(actor Main (def-constructor (start) (me (new C 'mk))))");
  CHECK(r.code == 2);

  auto ctor = run_source(main_with("(if (eq? (type-of #self) 'ActorReference)"
                                   " (println \"actor\") (println \"?\"))"));
  CHECK(ctor.out == "actor\n");
}

TEST_CASE("unknown selector names the receiver class") {
  auto r = run_source(main_with("(frobnicate 3)"));
  CHECK(r.code == 2);
  CHECK(r.error.find("unknown selector") != std::string::npos);
  CHECK(r.error.find("Number") != std::string::npos);
}

TEST_CASE("member bodies return their last expression") {
  auto r = run_source(
      "(class C (def-constructor (mk)) (def-routine (three) 1 2 3))"
      "(actor Main (def-constructor (start) (println \"\" (three (new C 'mk)))))");
  CHECK(r.out == "3\n");
}

TEST_CASE("evaluation depth is bounded with a clean diagnostic") {
  // A method may recurse without the termination guard; the evaluator depth
  // limit turns runaway recursion into an error instead of a crash.
  auto r = run_source(
      "(actor Main (def-constructor (start) (loop #self))"
      "  (def-method (loop) #undefined))");
  CHECK(r.code == 2); // ActorReference has no 'loop member

  auto deep = run_source(
      "(class C (def-constructor (mk)) (def-method (rec c) (rec c c)))"
      "(actor Main (def-constructor (start) (def c (new C 'mk)) (rec c c)))");
  CHECK(deep.code == 2);
  CHECK(deep.error.find("depth") != std::string::npos);
}
