#include "dag.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "eval.hpp"
#include "program.hpp"

namespace arlang {

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Source: return "source";
    case NodeKind::ImplicitSource: return "implicit-source";
    case NodeKind::Const: return "const";
    case NodeKind::Apply: return "apply";
    case NodeKind::Qualify: return "qualify";
    case NodeKind::Sink: return "sink";
  }
  return "node";
}

namespace {

const Dag& compile_impl(Program& program, const std::string& name,
                        std::vector<std::string>& stack);

class DagBuilder {
public:
  DagBuilder(Program& program, std::vector<std::string>& stack, std::string name)
      : program_(program), stack_(stack) {
    dag_.name = std::move(name);
  }

  Dag build_normal(const ReactorBehaviourDef& def) {
    for (const auto& p : def.params) {
      int id = add_node(NodeKind::Source, p, def.pos);
      dag_.explicit_sources.push_back(id);
      bind(p, id, def.pos);
    }
    bool seen_out = false;
    for (const auto& e : def.body) {
      switch (e->kind) {
        case ExprKind::Def: {
          std::vector<int> ids = compile_multi(*e->kids[0]);
          if (ids.size() != 1)
            fail(ErrKind::Compile, e->pos,
                 "def binds one value; use def-values for multi-sink compositions");
          bind(e->name, ids[0], e->pos);
          break;
        }
        case ExprKind::DefValues: {
          std::vector<int> ids = compile_multi(*e->kids[0]);
          if (ids.size() != e->names.size())
            fail(ErrKind::Compile, e->pos,
                 "def-values binds " + std::to_string(e->names.size()) +
                     " name(s) but the composition has " + std::to_string(ids.size()) +
                     " sink(s)");
          for (size_t i = 0; i < ids.size(); i++) bind(e->names[i], ids[i], e->pos);
          break;
        }
        case ExprKind::Out: {
          if (seen_out)
            fail(ErrKind::Compile, e->pos, "reactor behaviour has more than one out form");
          seen_out = true;
          for (const auto& operand : e->kids) {
            int producer = compile_operand(*operand);
            int sink = add_node(NodeKind::Sink, "", operand->pos);
            dag_.nodes[sink].inputs.push_back(producer);
            dag_.sinks.push_back(sink);
          }
          break;
        }
        default:
          compile_multi(*e);
          break;
      }
    }
    if (!seen_out)
      fail(ErrKind::Compile, def.pos,
           "reactor behaviour " + def.name + " needs an out form");
    return finish(def.pos);
  }

  Dag build_ror(const ReactorBehaviourDef& def) {
    const Dag& out_dag = compile_impl(program_, def.ror_out, stack_);
    std::vector<const Dag*> inputs;
    int provided = 0;
    for (const auto& in_name : def.ror_inputs) {
      const Dag& in = compile_impl(program_, in_name, stack_);
      inputs.push_back(&in);
      provided += in.sink_count();
    }
    if (provided != out_dag.explicit_source_count())
      fail(ErrKind::Compile, def.pos,
           "ror: " + def.ror_out + " has " +
               std::to_string(out_dag.explicit_source_count()) +
               " source(s) but the input behaviours provide " +
               std::to_string(provided) + " sink(s)");
    std::vector<int> produced;
    for (const Dag* in : inputs) {
      std::vector<int> p = inline_dag(*in, nullptr, false);
      produced.insert(produced.end(), p.begin(), p.end());
    }
    inline_dag(out_dag, &produced, true);
    return finish(def.pos);
  }

private:
  Program& program_;
  std::vector<std::string>& stack_;
  Dag dag_;
  std::unordered_map<std::string, int> env_;

  int add_node(NodeKind kind, std::string label, SourcePos pos) {
    DagNode n;
    n.kind = kind;
    n.label = std::move(label);
    n.pos = pos;
    dag_.nodes.push_back(std::move(n));
    return static_cast<int>(dag_.nodes.size() - 1);
  }

  void bind(const std::string& name, int id, SourcePos pos) {
    if (env_.count(name))
      fail(ErrKind::Compile, pos, "duplicate definition of '" + name + "'");
    env_[name] = id;
  }

  // An expression is constant-foldable when it depends on no source, implicit
  // source or composition: only literals, names bound to const nodes, and
  // invocations/conditionals/constructions over foldable operands.
  bool foldable(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Literal:
        return true;
      case ExprKind::Var: {
        auto it = env_.find(e.name);
        return it != env_.end() && dag_.nodes[it->second].kind == NodeKind::Const;
      }
      case ExprKind::If:
      case ExprKind::New:
      case ExprKind::Invoke: {
        for (const auto& k : e.kids)
          if (!foldable(*k)) return false;
        return true;
      }
      case ExprKind::Cond: {
        for (const auto& arm : e.arms) {
          if (arm.test && !foldable(*arm.test)) return false;
          for (const auto& b : arm.body)
            if (!foldable(*b)) return false;
        }
        return true;
      }
      default:
        return false;
    }
  }

  int fold(const Expr& e) {
    GuardStack guard;
    EvalContext cx{program_, nullptr, nullptr, &guard};
    Activation act;
    act.kind = ActKind::DagApply;
    act.pure = true;
    act.class_name = dag_.name;
    act.selector = "const";
    act.call_pos = e.pos;
    Scope scope;
    for (const auto& [name, id] : env_)
      if (dag_.nodes[id].kind == NodeKind::Const)
        scope.define(name, dag_.nodes[id].const_value);
    Value v;
    try {
      v = eval(e, scope, act, cx);
    } catch (const Error& err) {
      if (err.is_load_error()) throw;
      fail(ErrKind::Compile, err.pos(),
           "while computing a constant in " + dag_.name + ": " + err.what());
    }
    int id = add_node(NodeKind::Const, "", e.pos);
    dag_.nodes[id].const_value = std::move(v);
    return id;
  }

  std::vector<int> compile_multi(const Expr& e) {
    if (e.kind == ExprKind::Tick) return compile_tick(e);
    return {compile_operand(e)};
  }

  int compile_operand(const Expr& e) {
    if (foldable(e)) return fold(e);
    switch (e.kind) {
      case ExprKind::Var: {
        auto it = env_.find(e.name);
        if (it == env_.end())
          fail(ErrKind::Compile, e.pos, "unbound name '" + e.name + "'");
        return it->second;
      }
      case ExprKind::Qualify: {
        auto it = env_.find(e.name);
        if (it == env_.end())
          fail(ErrKind::Compile, e.pos, "unbound name '" + e.name + "'");
        int qualify = add_node(NodeKind::Qualify, e.aux, e.pos);
        dag_.nodes[qualify].inputs.push_back(it->second);
        int implicit = add_node(NodeKind::ImplicitSource, e.aux, e.pos);
        dag_.nodes[qualify].paired = implicit;
        dag_.nodes[implicit].paired = qualify;
        dag_.implicit_sources.push_back(implicit);
        return implicit;
      }
      case ExprKind::Invoke: {
        std::vector<int> inputs;
        inputs.reserve(e.kids.size());
        for (const auto& k : e.kids) inputs.push_back(compile_operand(*k));
        int id = add_node(NodeKind::Apply, e.name, e.pos);
        dag_.nodes[id].inputs = std::move(inputs);
        return id;
      }
      case ExprKind::Tick: {
        std::vector<int> ids = compile_tick(e);
        if (ids.size() != 1)
          fail(ErrKind::Compile, e.pos,
               "tick of a multi-sink behaviour must be bound with def-values");
        return ids[0];
      }
      case ExprKind::If:
      case ExprKind::Cond:
        fail(ErrKind::Compile, e.pos,
             "conditionals in reactor bodies must be constant; move the branching "
             "into a routine");
      case ExprKind::New:
        fail(ErrKind::Compile, e.pos,
             "new in a reactor body must have constant arguments; build composite "
             "values inside a routine");
      case ExprKind::SelfRef:
        fail(ErrKind::Compile, e.pos, "#self is not available in reactor bodies");
      case ExprKind::Def:
      case ExprKind::DefValues:
      case ExprKind::Out:
        fail(ErrKind::Compile, e.pos,
             "form is only allowed at the top level of a reactor body");
      default:
        fail(ErrKind::Compile, e.pos, "form is not allowed in a reactor body");
    }
  }

  std::vector<int> compile_tick(const Expr& e) {
    const Dag& callee = compile_impl(program_, e.name, stack_);
    if (static_cast<int>(e.kids.size()) != callee.explicit_source_count())
      fail(ErrKind::Compile, e.pos,
           "tick " + e.name + " expects " +
               std::to_string(callee.explicit_source_count()) + " argument(s), got " +
               std::to_string(e.kids.size()));
    std::vector<int> args;
    args.reserve(e.kids.size());
    for (const auto& k : e.kids) args.push_back(compile_operand(*k));
    return inline_dag(callee, &args, false);
  }

  // Copies callee into the dag under construction. When arg_nodes is given,
  // the callee's explicit sources are replaced by those nodes (boundary
  // elimination); otherwise they are copied as fresh sources. Sinks are
  // copied only when keep_sinks is set; the returned list holds the host ids
  // of each callee sink's producer.
  std::vector<int> inline_dag(const Dag& callee, const std::vector<int>* arg_nodes,
                              bool keep_sinks) {
    std::unordered_map<int, int> map;
    if (arg_nodes) {
      for (size_t i = 0; i < callee.explicit_sources.size(); i++)
        map[callee.explicit_sources[i]] = (*arg_nodes)[i];
    }
    for (int id = 0; id < static_cast<int>(callee.nodes.size()); id++) {
      const DagNode& n = callee.nodes[id];
      if (n.kind == NodeKind::Source && arg_nodes) continue;
      if (n.kind == NodeKind::Sink && !keep_sinks) continue;
      int host = add_node(n.kind, n.label, n.pos);
      DagNode& hn = dag_.nodes[host];
      hn.const_value = n.const_value;
      hn.inputs.reserve(n.inputs.size());
      for (int in : n.inputs) hn.inputs.push_back(map.at(in));
      if (n.kind == NodeKind::ImplicitSource) {
        int host_qualify = map.at(n.paired);
        hn.paired = host_qualify;
        dag_.nodes[host_qualify].paired = host;
        dag_.implicit_sources.push_back(host);
      }
      if (n.kind == NodeKind::Source) dag_.explicit_sources.push_back(host);
      if (n.kind == NodeKind::Sink) dag_.sinks.push_back(host);
      map[id] = host;
    }
    std::vector<int> produced;
    produced.reserve(callee.sinks.size());
    for (int sink : callee.sinks) produced.push_back(map.at(callee.nodes[sink].inputs[0]));
    return produced;
  }

  Dag finish(SourcePos pos) {
    if (dag_.explicit_sources.empty() && dag_.implicit_sources.empty())
      fail(ErrKind::Compile, pos,
           "reactor behaviour " + dag_.name + " needs at least one source");
    dag_.consumers.assign(dag_.nodes.size(), {});
    for (int id = 0; id < static_cast<int>(dag_.nodes.size()); id++) {
      DagNode& n = dag_.nodes[id];
      for (size_t slot = 0; slot < n.inputs.size(); slot++) {
        int in = n.inputs[slot];
        if (in >= id)
          fail(ErrKind::Compile, n.pos, "internal error: dependency cycle in " + dag_.name);
        if (dag_.nodes[in].kind == NodeKind::Sink)
          fail(ErrKind::Compile, n.pos, "internal error: sink with consumers in " + dag_.name);
        dag_.consumers[in].emplace_back(id, static_cast<int>(slot));
        n.height = std::max(n.height, dag_.nodes[in].height + 1);
        n.sched = std::max(n.sched, dag_.nodes[in].sched + 1);
      }
      if (n.kind == NodeKind::ImplicitSource)
        n.sched = dag_.nodes[n.paired].sched + 1;
    }
    dag_.sched_order.resize(dag_.nodes.size());
    for (size_t i = 0; i < dag_.nodes.size(); i++) dag_.sched_order[i] = static_cast<int>(i);
    std::stable_sort(dag_.sched_order.begin(), dag_.sched_order.end(), [&](int a, int b) {
      if (dag_.nodes[a].sched != dag_.nodes[b].sched)
        return dag_.nodes[a].sched < dag_.nodes[b].sched;
      return a < b;
    });
    return std::move(dag_);
  }
};

const Dag& compile_impl(Program& program, const std::string& name,
                        std::vector<std::string>& stack) {
  if (const Dag* existing = program.find_dag(name)) return *existing;
  const ReactorBehaviourDef* def = program.defs.find_reactor(name);
  if (!def)
    fail(ErrKind::Compile, SourcePos{}, "unknown reactor behaviour '" + name + "'");
  for (const auto& active : stack)
    if (active == name)
      fail(ErrKind::Compile, def->pos,
           "reactor behaviour '" + name + "' is composed from itself");
  stack.push_back(name);
  DagBuilder builder(program, stack, name);
  Dag dag = def->is_ror ? builder.build_ror(*def) : builder.build_normal(*def);
  stack.pop_back();
  auto [it, inserted] = program.dags.emplace(name, std::move(dag));
  (void)inserted;
  return it->second;
}

} // namespace

const Dag& compile_reactor(Program& program, const std::string& name) {
  std::vector<std::string> stack;
  return compile_impl(program, name, stack);
}

void compile_all_reactors(Program& program) {
  for (const auto& def : program.defs.reactors) compile_reactor(program, def.name);
}

std::string dump_dag(const Dag& dag) {
  std::string out = "dag " + dag.name + "\n";
  auto id_list = [](const std::vector<int>& ids) {
    std::string s;
    for (int id : ids) s += " " + std::to_string(id);
    return s;
  };
  out += "explicit-sources" + id_list(dag.explicit_sources) + "\n";
  out += "implicit-sources" + id_list(dag.implicit_sources) + "\n";
  out += "sinks" + id_list(dag.sinks) + "\n";
  for (int id = 0; id < static_cast<int>(dag.nodes.size()); id++) {
    const DagNode& n = dag.nodes[id];
    out += "node " + std::to_string(id) + " " + node_kind_name(n.kind);
    switch (n.kind) {
      case NodeKind::Source: out += " " + n.label; break;
      case NodeKind::Const: out += " " + display(n.const_value); break;
      case NodeKind::Apply:
        out += " " + n.label + " slots " + std::to_string(n.inputs.size());
        break;
      case NodeKind::Qualify: out += " " + n.label; break;
      default: break;
    }
    out += " height " + std::to_string(n.height);
    if (n.kind == NodeKind::Qualify) out += " implicit " + std::to_string(n.paired);
    if (n.kind == NodeKind::ImplicitSource) out += " qualify " + std::to_string(n.paired);
    out += "\n";
  }
  for (int id = 0; id < static_cast<int>(dag.nodes.size()); id++) {
    const DagNode& n = dag.nodes[id];
    for (size_t slot = 0; slot < n.inputs.size(); slot++)
      out += "edge " + std::to_string(n.inputs[slot]) + " -> " + std::to_string(id) +
             " slot " + std::to_string(slot) + "\n";
  }
  return out;
}

} // namespace arlang
