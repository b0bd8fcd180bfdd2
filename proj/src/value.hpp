#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ast.hpp"

namespace arlang {

enum class ValueKind {
  Undefined,
  Boolean,
  Number,
  String,
  Symbol,
  Instance,
  ActorRef,
  ReactorRef,
  StreamRef,
};

struct Instance;
using InstancePtr = std::shared_ptr<Instance>;

struct UndefinedV {};
struct SymbolV {
  std::string name;
};
struct ActorRefV {
  uint64_t pid = 0;
};
struct ReactorRefV {
  uint64_t pid = 0;
};
struct StreamRefV {
  uint64_t owner_pid = 0;
  bool owner_is_reactor = false;
  std::string stream;
  int arity = 1;
};

class Value {
public:
  Value() : rep_(UndefinedV{}) {}

  static Value undefined() { return Value(); }
  static Value boolean(bool b) { return Value(Rep(b)); }
  static Value number(double d) { return Value(Rep(d)); }
  static Value string(std::string s) {
    return Value(Rep(std::make_shared<const std::string>(std::move(s))));
  }
  static Value symbol(std::string name) { return Value(Rep(SymbolV{std::move(name)})); }
  static Value instance(InstancePtr i) { return Value(Rep(std::move(i))); }
  static Value actor_ref(uint64_t pid) { return Value(Rep(ActorRefV{pid})); }
  static Value reactor_ref(uint64_t pid) { return Value(Rep(ReactorRefV{pid})); }
  static Value stream_ref(StreamRefV s) { return Value(Rep(std::move(s))); }

  ValueKind kind() const { return static_cast<ValueKind>(rep_.index()); }

  bool is_undefined() const { return kind() == ValueKind::Undefined; }
  bool is_number() const { return kind() == ValueKind::Number; }
  bool is_instance() const { return kind() == ValueKind::Instance; }

  bool as_boolean() const { return std::get<bool>(rep_); }
  double as_number() const { return std::get<double>(rep_); }
  const std::string& as_string() const {
    return *std::get<std::shared_ptr<const std::string>>(rep_);
  }
  const std::string& as_symbol() const { return std::get<SymbolV>(rep_).name; }
  const InstancePtr& as_instance() const { return std::get<InstancePtr>(rep_); }
  const ActorRefV& as_actor_ref() const { return std::get<ActorRefV>(rep_); }
  const ReactorRefV& as_reactor_ref() const { return std::get<ReactorRefV>(rep_); }
  const StreamRefV& as_stream_ref() const { return std::get<StreamRefV>(rep_); }

  // Everything is true except #false and #undefined.
  bool truthy() const {
    if (kind() == ValueKind::Undefined) return false;
    if (kind() == ValueKind::Boolean) return as_boolean();
    return true;
  }

private:
  using Rep = std::variant<UndefinedV, bool, double,
                           std::shared_ptr<const std::string>, SymbolV,
                           InstancePtr, ActorRefV, ReactorRefV, StreamRefV>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

struct Instance {
  const ClassDef* cls;
  std::vector<Value> fields; // one slot per cls->fields entry
};

InstancePtr make_instance(const ClassDef* cls);

// Class-name symbol for type-of: 'Number, 'Pair, 'ActorReference, 'Stream, ...
const std::string& type_name(const Value& v);

// Deep structural equality (equal?). Cycle-safe via pair-wise bisimulation.
bool equals(const Value& a, const Value& b);

// Reference equality (eq?): identity on instances, designation equality on
// refs, value equality on natives.
bool ref_equals(const Value& a, const Value& b);

// Copies instances recursively, preserving sharing and cycles within the
// payload. Natives and process/stream references are returned as-is.
Value deep_copy(const Value& v);

// Well-founded size measure: |n| for numbers, length for strings, 0 for the
// other natives and for references, distinct reachable instance count
// (including the root) for instances.
double size_of(const Value& v);

// Display form used by println and diagnostics: numbers in shortest
// round-trip notation, strings raw, symbols by name.
std::string display(const Value& v);
std::string number_to_string(double v);

const char* value_kind_name(ValueKind k);

} // namespace arlang
