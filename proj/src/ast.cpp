#include "ast.hpp"

#include <charconv>
#include <sstream>

namespace arlang {

ExprPtr make_expr(ExprKind kind, SourcePos pos) {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

const char* member_kind_name(MemberKind k) {
  switch (k) {
    case MemberKind::Constructor: return "constructor";
    case MemberKind::Method: return "method";
    case MemberKind::Routine: return "routine";
  }
  return "member";
}

namespace {

std::string number_text(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void print_into(const Expr& e, std::string& out);

void print_seq(const std::vector<ExprPtr>& kids, std::string& out, size_t from = 0) {
  for (size_t i = from; i < kids.size(); i++) {
    out.push_back(' ');
    print_into(*kids[i], out);
  }
}

void print_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::Literal:
      switch (e.lit) {
        case LitKind::Number: out += number_text(e.number); return;
        case LitKind::String: out += quote_string(e.text); return;
        case LitKind::Symbol: out += "'" + e.text; return;
        case LitKind::True: out += "#true"; return;
        case LitKind::False: out += "#false"; return;
        case LitKind::Undefined: out += "#undefined"; return;
      }
      return;
    case ExprKind::Var: out += e.name; return;
    case ExprKind::Qualify: out += e.name + "." + e.aux; return;
    case ExprKind::SelfRef: out += "#self"; return;
    case ExprKind::Def:
      out += "(def " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::DefValues: {
      out += "(def-values (";
      for (size_t i = 0; i < e.names.size(); i++) {
        if (i) out.push_back(' ');
        out += e.names[i];
      }
      out += ")";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    }
    case ExprKind::Set:
      out += "(set! " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::If:
      out += "(if";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Cond: {
      out += "(cond";
      for (const auto& arm : e.arms) {
        out += " (";
        if (arm.test) {
          print_into(*arm.test, out);
        } else {
          out += "else";
        }
        print_seq(arm.body, out);
        out.push_back(')');
      }
      out.push_back(')');
      return;
    }
    case ExprKind::New:
      out += "(new " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Invoke:
      out += "(" + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::SpawnActor:
      out += "(spawn-actor " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::SpawnReactor:
      out += "(spawn-reactor " + e.name;
      out.push_back(')');
      return;
    case ExprKind::Send:
      out += "(send";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Emit:
      out += "(emit " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Monitor:
      out += "(monitor";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::ReactTo:
      out += "(react-to";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Tick:
      out += "(tick " + e.name;
      print_seq(e.kids, out);
      out.push_back(')');
      return;
    case ExprKind::Ror: {
      out += "(ror " + e.name;
      for (const auto& n : e.names) out += " " + n;
      out.push_back(')');
      return;
    }
    case ExprKind::Out:
      out += "(out";
      print_seq(e.kids, out);
      out.push_back(')');
      return;
  }
}

void print_member(const MemberDef& m, std::string& out) {
  out += "  (def-";
  out += member_kind_name(m.kind);
  out += " (" + m.selector;
  for (const auto& p : m.params) out += " " + p;
  out += ")";
  for (const auto& e : m.body) {
    out += "\n    ";
    print_into(*e, out);
  }
  out += ")\n";
}

} // namespace

std::string print_expr(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

std::string print_program(const ProgramDef& p) {
  std::string out;
  for (const auto& c : p.classes) {
    if (c.builtin) continue;
    out += "(class " + c.name + "\n";
    if (!c.fields.empty()) {
      out += "  (def-fields";
      for (const auto& f : c.fields) out += " " + f;
      out += ")\n";
    }
    for (const auto& m : c.members) print_member(m, out);
    out += ")\n\n";
  }
  for (const auto& a : p.actors) {
    out += "(actor " + a.name + "\n";
    for (const auto& s : a.streams)
      out += "  (def-stream " + s.name + " " + number_text(s.arity) + ")\n";
    if (!a.fields.empty()) {
      out += "  (def-fields";
      for (const auto& f : a.fields) out += " " + f;
      out += ")\n";
    }
    for (const auto& m : a.members) print_member(m, out);
    out += ")\n\n";
  }
  for (const auto& r : p.reactors) {
    if (r.is_ror) {
      out += "(reactor " + r.name + " (ror " + r.ror_out;
      for (const auto& n : r.ror_inputs) out += " " + n;
      out += "))\n\n";
      continue;
    }
    out += "(reactor (" + r.name;
    for (const auto& pn : r.params) out += " " + pn;
    out += ")";
    for (const auto& e : r.body) {
      out += "\n  ";
      print_into(*e, out);
    }
    out += ")\n\n";
  }
  return out;
}

namespace {

bool exprs_equal(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++)
    if (!expr_equal(*a[i], *b[i])) return false;
  return true;
}

bool members_equal(const std::vector<MemberDef>& a, const std::vector<MemberDef>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++) {
    if (a[i].kind != b[i].kind || a[i].selector != b[i].selector ||
        a[i].params != b[i].params || !exprs_equal(a[i].body, b[i].body))
      return false;
  }
  return true;
}

} // namespace

bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == ExprKind::Literal) {
    if (a.lit != b.lit) return false;
    if (a.lit == LitKind::Number && a.number != b.number) return false;
    if ((a.lit == LitKind::String || a.lit == LitKind::Symbol) && a.text != b.text)
      return false;
  }
  if (a.name != b.name || a.aux != b.aux || a.names != b.names) return false;
  if (!exprs_equal(a.kids, b.kids)) return false;
  if (a.arms.size() != b.arms.size()) return false;
  for (size_t i = 0; i < a.arms.size(); i++) {
    const auto& x = a.arms[i];
    const auto& y = b.arms[i];
    if ((x.test == nullptr) != (y.test == nullptr)) return false;
    if (x.test && !expr_equal(*x.test, *y.test)) return false;
    if (!exprs_equal(x.body, y.body)) return false;
  }
  return true;
}

bool program_equal(const ProgramDef& a, const ProgramDef& b) {
  if (a.classes.size() != b.classes.size() || a.actors.size() != b.actors.size() ||
      a.reactors.size() != b.reactors.size())
    return false;
  for (size_t i = 0; i < a.classes.size(); i++) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.fields != y.fields || !members_equal(x.members, y.members))
      return false;
  }
  for (size_t i = 0; i < a.actors.size(); i++) {
    const auto& x = a.actors[i];
    const auto& y = b.actors[i];
    if (x.name != y.name || x.fields != y.fields || !members_equal(x.members, y.members))
      return false;
    if (x.streams.size() != y.streams.size()) return false;
    for (size_t j = 0; j < x.streams.size(); j++)
      if (x.streams[j].name != y.streams[j].name || x.streams[j].arity != y.streams[j].arity)
        return false;
  }
  for (size_t i = 0; i < a.reactors.size(); i++) {
    const auto& x = a.reactors[i];
    const auto& y = b.reactors[i];
    if (x.name != y.name || x.is_ror != y.is_ror || x.params != y.params ||
        x.ror_out != y.ror_out || x.ror_inputs != y.ror_inputs ||
        !exprs_equal(x.body, y.body))
      return false;
  }
  return true;
}

} // namespace arlang
