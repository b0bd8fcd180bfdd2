#include "sct.hpp"

#include <cmath>

#include "value.hpp"

namespace arlang {

bool size_strictly_less(double a, double b) {
  return std::floor(a) < std::floor(b);
}

std::string guard_tuple_str(const std::vector<double>& sizes) {
  std::string s = "(";
  for (size_t i = 0; i < sizes.size(); i++) {
    if (i) s += ", ";
    s += number_to_string(sizes[i]);
  }
  s += ")";
  return s;
}

void GuardStack::enter(const GuardFrame& frame, SourcePos pos) {
  for (const auto& ancestor : frames_) {
    if (ancestor.class_name != frame.class_name || ancestor.selector != frame.selector)
      continue;
    bool descends = false;
    for (size_t i = 0; i < frame.sizes.size() && i < ancestor.sizes.size(); i++) {
      if (size_strictly_less(frame.sizes[i], ancestor.sizes[i])) {
        descends = true;
        break;
      }
    }
    if (trace_) {
      trace_("sct " + frame.class_name + "." + frame.selector + " " +
             guard_tuple_str(frame.sizes) + " vs " + guard_tuple_str(ancestor.sizes) +
             (descends ? " descend" : " reject"));
    }
    if (!descends) {
      fail(ErrKind::Termination, pos,
           frame.class_name + "." + frame.selector + ": entry " +
               guard_tuple_str(frame.sizes) + " does not decrease against active call " +
               guard_tuple_str(ancestor.sizes));
    }
  }
  frames_.push_back(frame);
}

void GuardStack::leave() {
  if (!frames_.empty()) frames_.pop_back();
}

} // namespace arlang
