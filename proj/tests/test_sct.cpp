#include <doctest.h>

#include "sct.hpp"
#include "support.hpp"

using namespace arlang;
using testsupport::run_source;

namespace {

GuardFrame frame(std::vector<double> sizes) {
  return GuardFrame{"C", "r", std::move(sizes)};
}

} // namespace

TEST_CASE("guard admits strictly descending receiver sizes") {
  GuardStack stack;
  // factorial-style: receiver size descends 5,4,...,0
  for (double n = 5; n >= 0; n--) CHECK_NOTHROW(stack.enter(frame({n}), SourcePos{}));
}

TEST_CASE("guard rejects a non-descending recursive entry") {
  GuardStack stack;
  stack.enter(frame({1}), SourcePos{});
  CHECK_THROWS_AS(stack.enter(frame({1}), SourcePos{}), Error);
}

TEST_CASE("guard rejects argument swapping against the grand ancestor") {
  GuardStack stack;
  stack.enter(frame({0, 5, 3}), SourcePos{});
  // against (0,5,3): position 1 descends
  CHECK_NOTHROW(stack.enter(frame({0, 3, 5}), SourcePos{}));
  // (0,5,3) again: descends against the parent (position 2) but not against
  // the grand ancestor -> rejected
  CHECK_THROWS_AS(stack.enter(frame({0, 5, 3}), SourcePos{}), Error);
}

TEST_CASE("guard ignores frames of other routines") {
  GuardStack stack;
  stack.enter(GuardFrame{"C", "other", {1}}, SourcePos{});
  stack.enter(GuardFrame{"D", "r", {1}}, SourcePos{});
  CHECK_NOTHROW(stack.enter(frame({1}), SourcePos{}));
}

TEST_CASE("guard frames pop on leave") {
  GuardStack stack;
  stack.enter(frame({1}), SourcePos{});
  stack.leave();
  CHECK_NOTHROW(stack.enter(frame({1}), SourcePos{}));
}

TEST_CASE("number descent needs a whole-unit decrease") {
  CHECK(size_strictly_less(4, 5));
  CHECK_FALSE(size_strictly_less(5, 5));
  CHECK(size_strictly_less(4.5, 5)); // floor 4 < floor 5
  CHECK_FALSE(size_strictly_less(4.5, 4.9));
  // halving real values stalls once under the next whole number
  CHECK_FALSE(size_strictly_less(0.25, 0.5));
  GuardStack stack;
  stack.enter(frame({0.5}), SourcePos{});
  CHECK_THROWS_AS(stack.enter(frame({0.25}), SourcePos{}), Error);
}

TEST_CASE("violation names class, selector and both tuples") {
  GuardStack stack;
  stack.enter(GuardFrame{"Pair", "length", {1}}, SourcePos{});
  try {
    stack.enter(GuardFrame{"Pair", "length", {1}}, SourcePos{});
    FAIL("expected termination violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Termination);
    std::string msg = e.what();
    CHECK(msg.find("Pair.length") != std::string::npos);
    CHECK(msg.find("(1)") != std::string::npos);
  }
}

// --- program-level behaviour ---------------------------------------------------

TEST_CASE("circular list length is rejected, proper list length succeeds") {
  auto circular = run_source(testsupport::read_file(
      testsupport::corpus_path("circular_list.arl")));
  CHECK(circular.code == 2);
  CHECK(circular.error.find("termination violation") != std::string::npos);
  CHECK(circular.error.find("Pair.length") != std::string::npos);

  auto proper = run_source(
      "(class Pair (def-fields car cdr)"
      " (def-constructor (initialize-with a d) (set! car a) (set! cdr d))"
      " (def-routine (length)"
      "  (cond ((eq? cdr #undefined) 1)"
      "        ((eq? (type-of cdr) 'Pair) (+ 1 (length cdr)))"
      "        (else 2))))"
      "(actor Main (def-constructor (start)"
      " (def l (new Pair 'initialize-with 3 (new Pair 'initialize-with 2"
      "   (new Pair 'initialize-with 1 #undefined))))"
      " (println \"len=\" (length l))))");
  CHECK(proper.code == 0);
  CHECK(proper.out == "len=3\n");
}

TEST_CASE("factorial-style descending recursion completes") {
  auto r = run_source(
      "(class Math (def-constructor (mk))"
      " (def-routine (fact self n) (if (< n 1) 1 (* n (fact self self (- n 1))))))"
      "(actor Main (def-constructor (start)"
      " (def m (new Math 'mk))"
      " (println \"\" (fact m m 10))))");
  CHECK(r.code == 0);
  CHECK(r.out == "3628800\n");
}

TEST_CASE("nondecreasing numeric recursion is rejected") {
  auto r = run_source(
      "(class Math (def-constructor (mk))"
      " (def-routine (f self n) (f self self n)))"
      "(actor Main (def-constructor (start)"
      " (def m (new Math 'mk)) (f m m 5)))");
  CHECK(r.code == 2);
  CHECK(r.error.find("termination violation") != std::string::npos);
}

TEST_CASE("trace output reports comparisons when enabled") {
  testsupport::RunSpec spec;
  spec.trace_sct = true;
  auto r = run_source(
      "(class Math (def-constructor (mk))"
      " (def-routine (fact self n) (if (< n 1) 1 (* n (fact self self (- n 1))))))"
      "(actor Main (def-constructor (start)"
      " (def m (new Math 'mk)) (fact m m 3)))",
      spec);
  CHECK(r.code == 0);
  CHECK(r.err.find("sct Math.fact") != std::string::npos);
  CHECK(r.err.find("descend") != std::string::npos);
}
