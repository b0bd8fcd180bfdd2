#include <doctest.h>

#include <filesystem>

#include "parser.hpp"
#include "support.hpp"

using namespace arlang;

namespace {

ProgramDef parse_corpus(const std::string& name) {
  return parse_source(testsupport::read_file(testsupport::corpus_path(name)));
}

const char* kMainOnly = "(actor Main (def-constructor (start) #undefined))";

} // namespace

TEST_CASE("hello world program shape") {
  ProgramDef p = parse_corpus("hello.arl");
  REQUIRE(p.actors.size() == 1);
  CHECK(p.actors[0].name == "Main");
  const MemberDef* start = p.actors[0].find_member("start");
  REQUIRE(start != nullptr);
  CHECK(start->kind == MemberKind::Constructor);
  CHECK(start->params.empty());
  REQUIRE(start->body.size() == 1);
  CHECK(start->body[0]->kind == ExprKind::Invoke);
  CHECK(start->body[0]->name == "println");
}

TEST_CASE("Pair class shape") {
  ProgramDef p = parse_corpus("circular_list.arl");
  const ClassDef* pair = p.find_class("Pair");
  REQUIRE(pair != nullptr);
  CHECK(pair->fields == std::vector<std::string>{"car", "cdr"});
  int constructors = 0, methods = 0, routines = 0;
  for (const auto& m : pair->members) {
    if (m.kind == MemberKind::Constructor) constructors++;
    if (m.kind == MemberKind::Method) methods++;
    if (m.kind == MemberKind::Routine) routines++;
  }
  CHECK(constructors == 1);
  CHECK(methods == 2);
  CHECK(routines == 3);
  CHECK(pair->find_member("length")->kind == MemberKind::Routine);
  CHECK(pair->find_member("set-first!")->kind == MemberKind::Method);
}

TEST_CASE("WindPower reactor shape") {
  ProgramDef p = parse_corpus("turbine_simulator.arl");
  const ReactorBehaviourDef* wp = p.find_reactor("WindPower");
  REQUIRE(wp != nullptr);
  CHECK(wp->params ==
        std::vector<std::string>{"blade-length", "air-density", "wind-speed"});
  REQUIRE(wp->body.size() == 2);
  CHECK(wp->body[0]->kind == ExprKind::Def);
  CHECK(wp->body[1]->kind == ExprKind::Out);
  CHECK(wp->body[1]->kids.size() == 1);

  const ReactorBehaviourDef* tpo = p.find_reactor("TurbinePowerOutput");
  REQUIRE(tpo != nullptr);
  CHECK(tpo->is_ror);
  CHECK(tpo->ror_out == "PowerOutput");
  CHECK(tpo->ror_inputs == std::vector<std::string>{"Turbine"});
}

TEST_CASE("actor behaviour with stream declaration") {
  ProgramDef p = parse_corpus("wind_monitor.arl");
  const ActorBehaviourDef* wind = p.find_actor("Wind");
  REQUIRE(wind != nullptr);
  REQUIRE(wind->streams.size() == 1);
  CHECK(wind->streams[0].name == "speed");
  CHECK(wind->streams[0].arity == 1);
  CHECK(wind->fields == std::vector<std::string>{"rng"});
}

TEST_CASE("parsing is total on the example corpus") {
  int count = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(std::string(ARLANG_CORPUS_DIR))) {
    if (entry.path().extension() != ".arl") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_source(testsupport::read_file(entry.path().string())));
    count++;
  }
  CHECK(count >= 6);
}

TEST_CASE("round trip: parse(print(parse(x))) equals parse(x)") {
  for (const auto& entry :
       std::filesystem::directory_iterator(std::string(ARLANG_CORPUS_DIR))) {
    if (entry.path().extension() != ".arl") continue;
    CAPTURE(entry.path().string());
    ProgramDef p1 = parse_source(testsupport::read_file(entry.path().string()));
    ProgramDef p2 = parse_source(print_program(p1));
    CHECK(program_equal(p1, p2));
  }
  // forms the corpus does not cover: def-values, arity-2 streams, escapes
  std::string extra =
      "(reactor (Two x) (out x (+ x 1)))"
      "(reactor (W a) (def-values (p q) (tick Two a)) (out (- p q)))"
      "(actor G (def-stream loc 2) (def-constructor (mk))"
      "  (def-method (m) (emit loc 1 2) (println \"say \\\"hi\\\" \\\\\")))"
      "(actor Main (def-constructor (start) (cond (#true 'a 'b) (else 'c))))";
  ProgramDef p1 = parse_source(extra);
  ProgramDef p2 = parse_source(print_program(p1));
  CHECK(program_equal(p1, p2));
}

TEST_CASE("program structure validation") {
  CHECK_THROWS_AS(parse_source("(module Foo)"), Error);          // unknown form
  CHECK_THROWS_AS(parse_source("(class C)"), Error);             // missing Main
  CHECK_THROWS_AS(parse_source("(actor Main)"), Error);          // missing start
  CHECK_THROWS_AS(
      parse_source("(actor Main (def-constructor (start x) x))"), Error);
  CHECK_THROWS_AS(
      parse_source("(actor Main (def-method (start) 1))"), Error); // start not a ctor
  // duplicate member
  CHECK_THROWS_AS(parse_source("(class C (def-method (m) 1) (def-routine (m) 2))"
                               "(actor Main (def-constructor (start) 1))"),
                  Error);
  // duplicate top-level names within a category
  CHECK_THROWS_AS(parse_source(std::string("(class C) (class C)") + kMainOnly), Error);
  CHECK_THROWS_AS(parse_source("(actor Main (def-constructor (start) 1))"
                               "(actor Main (def-constructor (start) 1))"),
                  Error);
  // builtin class names are reserved
  CHECK_THROWS_AS(parse_source(std::string("(class Number)") + kMainOnly), Error);
}

TEST_CASE("tick and ror placement") {
  // tick outside a reactor body is a parse error
  CHECK_THROWS_AS(
      parse_source("(actor Main (def-constructor (start) (tick W 1)))"), Error);
  // ror in expression position is a parse error
  CHECK_THROWS_AS(
      parse_source(std::string("(reactor (R x) (def y (ror A B)) (out y))") + kMainOnly),
      Error);
  // out in a member body is a parse error
  CHECK_THROWS_AS(
      parse_source("(actor Main (def-constructor (start) (out 1)))"), Error);
  // def-values in a member body is a parse error
  CHECK_THROWS_AS(
      parse_source("(actor Main (def-constructor (start) (def-values (a) 1)))"),
      Error);
  // short reactor form takes exactly a ror body
  CHECK_THROWS_AS(parse_source(std::string("(reactor R (out 1))") + kMainOnly), Error);
}

TEST_CASE("purity check rejects each forbidden form in a routine body") {
  const char* bodies[] = {
      "(set! x 1)",
      "(spawn-actor W 'init)",
      "(spawn-reactor R)",
      "(send w 'blow)",
      "(emit s 1)",
      "(monitor w.speed 'm)",
      "(react-to r 1)",
  };
  for (const char* body : bodies) {
    CAPTURE(body);
    std::string src = std::string("(class C (def-routine (r x w) ") + body + "))" +
                      kMainOnly;
    try {
      ProgramDef p = parse_source(src);
      check_program_purity(p);
      FAIL_CHECK("expected purity violation for " << body);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrKind::Purity);
    }
  }
}

TEST_CASE("purity check rejects forbidden forms nested deep in reactor bodies") {
  std::string src = std::string("(reactor (R x) (def y (+ x (send w 'blow))) (out y))") +
                    kMainOnly;
  ProgramDef p = parse_source(src);
  CHECK_THROWS_AS(check_program_purity(p), Error);
}

TEST_CASE("purity accepts effect-free bodies") {
  std::string src = std::string("(class C (def-fields car)"
                                " (def-routine (r) car)"
                                " (def-routine (s x) (new C))"
                                " (def-routine (t x) (cond ((< x 1) 'a) (else 'b))))") +
                    kMainOnly;
  ProgramDef p = parse_source(src);
  CHECK_NOTHROW(check_program_purity(p));
}

TEST_CASE("purity violation reports the offending form position") {
  std::string src = std::string("(class C (def-routine (r)\n  (set! x 1)))") + kMainOnly;
  ProgramDef p = parse_source(src);
  try {
    check_program_purity(p);
    FAIL("expected purity violation");
  } catch (const Error& e) {
    CHECK(e.pos().line == 2);
    CHECK(std::string(e.what()).find("set!") != std::string::npos);
  }
}

TEST_CASE("constructor bodies may contain set!") {
  std::string src = "(class C (def-fields f) (def-constructor (init v) (set! f v)))"
                    "(actor Main (def-constructor (start) (new C 'init 1)))";
  ProgramDef p = parse_source(src);
  CHECK_NOTHROW(check_program_purity(p));
}
