#include "value.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace arlang {

InstancePtr make_instance(const ClassDef* cls) {
  auto inst = std::make_shared<Instance>();
  inst->cls = cls;
  inst->fields.assign(cls->fields.size(), Value::undefined());
  return inst;
}

const std::string& type_name(const Value& v) {
  static const std::string kUndefined = "Undefined";
  static const std::string kBoolean = "Boolean";
  static const std::string kNumber = "Number";
  static const std::string kString = "String";
  static const std::string kSymbol = "Symbol";
  static const std::string kActorRef = "ActorReference";
  static const std::string kReactorRef = "ReactorReference";
  static const std::string kStream = "Stream";
  switch (v.kind()) {
    case ValueKind::Undefined: return kUndefined;
    case ValueKind::Boolean: return kBoolean;
    case ValueKind::Number: return kNumber;
    case ValueKind::String: return kString;
    case ValueKind::Symbol: return kSymbol;
    case ValueKind::Instance: return v.as_instance()->cls->name;
    case ValueKind::ActorRef: return kActorRef;
    case ValueKind::ReactorRef: return kReactorRef;
    case ValueKind::StreamRef: return kStream;
  }
  return kUndefined;
}

namespace {

bool natives_equal(const Value& a, const Value& b) {
  switch (a.kind()) {
    case ValueKind::Undefined: return true;
    case ValueKind::Boolean: return a.as_boolean() == b.as_boolean();
    case ValueKind::Number: return a.as_number() == b.as_number();
    case ValueKind::String: return a.as_string() == b.as_string();
    case ValueKind::Symbol: return a.as_symbol() == b.as_symbol();
    case ValueKind::ActorRef: return a.as_actor_ref().pid == b.as_actor_ref().pid;
    case ValueKind::ReactorRef: return a.as_reactor_ref().pid == b.as_reactor_ref().pid;
    case ValueKind::StreamRef: {
      const auto& x = a.as_stream_ref();
      const auto& y = b.as_stream_ref();
      return x.owner_pid == y.owner_pid && x.owner_is_reactor == y.owner_is_reactor &&
             x.stream == y.stream;
    }
    case ValueKind::Instance: return false; // handled by caller
  }
  return false;
}

using InstPair = std::pair<const Instance*, const Instance*>;

struct InstPairHash {
  size_t operator()(const InstPair& p) const {
    return std::hash<const void*>()(p.first) * 31 ^ std::hash<const void*>()(p.second);
  }
};

bool equals_rec(const Value& a, const Value& b,
                std::unordered_set<InstPair, InstPairHash>& visited) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() != ValueKind::Instance) return natives_equal(a, b);
  const Instance* x = a.as_instance().get();
  const Instance* y = b.as_instance().get();
  if (x == y) return true;
  if (x->cls != y->cls || x->fields.size() != y->fields.size()) return false;
  // Coinductive: a pair under comparison is assumed equal on revisit, which
  // makes the bisimulation terminate on cyclic structures.
  if (!visited.insert({x, y}).second) return true;
  for (size_t i = 0; i < x->fields.size(); i++)
    if (!equals_rec(x->fields[i], y->fields[i], visited)) return false;
  return true;
}

} // namespace

bool equals(const Value& a, const Value& b) {
  std::unordered_set<InstPair, InstPairHash> visited;
  return equals_rec(a, b, visited);
}

bool ref_equals(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == ValueKind::Instance)
    return a.as_instance().get() == b.as_instance().get();
  return natives_equal(a, b);
}

namespace {

Value deep_copy_rec(const Value& v,
                    std::unordered_map<const Instance*, InstancePtr>& copies) {
  if (v.kind() != ValueKind::Instance) return v;
  const Instance* src = v.as_instance().get();
  auto it = copies.find(src);
  if (it != copies.end()) return Value::instance(it->second);
  auto dup = std::make_shared<Instance>();
  dup->cls = src->cls;
  copies.emplace(src, dup);
  dup->fields.reserve(src->fields.size());
  for (const auto& f : src->fields) dup->fields.push_back(deep_copy_rec(f, copies));
  return Value::instance(dup);
}

} // namespace

Value deep_copy(const Value& v) {
  std::unordered_map<const Instance*, InstancePtr> copies;
  return deep_copy_rec(v, copies);
}

double size_of(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Number: return std::fabs(v.as_number());
    case ValueKind::String: return static_cast<double>(v.as_string().size());
    case ValueKind::Instance: break;
    default: return 0;
  }
  std::unordered_set<const Instance*> seen;
  std::vector<const Instance*> stack{v.as_instance().get()};
  seen.insert(stack.back());
  while (!stack.empty()) {
    const Instance* inst = stack.back();
    stack.pop_back();
    for (const auto& f : inst->fields) {
      if (f.kind() != ValueKind::Instance) continue;
      const Instance* child = f.as_instance().get();
      if (seen.insert(child).second) stack.push_back(child);
    }
  }
  return static_cast<double>(seen.size());
}

std::string number_to_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string display(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Undefined: return "#undefined";
    case ValueKind::Boolean: return v.as_boolean() ? "#true" : "#false";
    case ValueKind::Number: return number_to_string(v.as_number());
    case ValueKind::String: return v.as_string();
    case ValueKind::Symbol: return v.as_symbol();
    case ValueKind::Instance: return "#<" + v.as_instance()->cls->name + ">";
    case ValueKind::ActorRef:
      return "#<actor " + std::to_string(v.as_actor_ref().pid) + ">";
    case ValueKind::ReactorRef:
      return "#<reactor " + std::to_string(v.as_reactor_ref().pid) + ">";
    case ValueKind::StreamRef: {
      const auto& s = v.as_stream_ref();
      return "#<stream " + std::to_string(s.owner_pid) + "." + s.stream + ">";
    }
  }
  return "";
}

const char* value_kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Undefined: return "undefined";
    case ValueKind::Boolean: return "boolean";
    case ValueKind::Number: return "number";
    case ValueKind::String: return "string";
    case ValueKind::Symbol: return "symbol";
    case ValueKind::Instance: return "instance";
    case ValueKind::ActorRef: return "actor reference";
    case ValueKind::ReactorRef: return "reactor reference";
    case ValueKind::StreamRef: return "stream reference";
  }
  return "value";
}

} // namespace arlang
