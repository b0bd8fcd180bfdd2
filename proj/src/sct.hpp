#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "diag.hpp"

namespace arlang {

// One active guarded activation. Position 0 of the tuple is the receiver
// size, positions 1..k the argument sizes.
struct GuardFrame {
  std::string class_name;
  std::string selector;
  std::vector<double> sizes;
};

std::string guard_tuple_str(const std::vector<double>& sizes);

// A size counts as strictly decreased only when its floor decreases; this
// keeps real-valued descent (x -> x/2) from passing forever.
bool size_strictly_less(double a, double b);

// Per-process guard stack enforcing size descent of recursive activations.
// Entry is allowed iff, against EVERY active frame with the same
// (class, selector), SOME tuple position strictly decreases.
class GuardStack {
public:
  using TraceFn = std::function<void(const std::string& line)>;

  // Throws Error(ErrKind::Termination) naming class, selector and the two
  // offending tuples.
  void enter(const GuardFrame& frame, SourcePos pos);
  void leave();

  size_t depth() const { return frames_.size(); }
  void set_trace(TraceFn fn) { trace_ = std::move(fn); }

private:
  std::vector<GuardFrame> frames_;
  TraceFn trace_;
};

// RAII helper pairing enter/leave across exceptions.
class GuardScope {
public:
  GuardScope(GuardStack& stack, const GuardFrame& frame, SourcePos pos)
      : stack_(stack) {
    stack_.enter(frame, pos);
  }
  ~GuardScope() { stack_.leave(); }
  GuardScope(const GuardScope&) = delete;
  GuardScope& operator=(const GuardScope&) = delete;

private:
  GuardStack& stack_;
};

} // namespace arlang
