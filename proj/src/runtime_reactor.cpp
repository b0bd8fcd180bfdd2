#include <algorithm>

#include "runtime.hpp"

namespace arlang {

namespace {

std::string tuple_str(const std::vector<Value>& tuple) {
  std::string s = "(";
  for (size_t i = 0; i < tuple.size(); i++) {
    if (i) s += ", ";
    s += display(tuple[i]);
  }
  s += ")";
  return s;
}

} // namespace

// Runs the subscription side of a qualify node: unsubscribe the previous
// stream, subscribe the newly referenced one, and seed the paired implicit
// source from the producer's cached last emission in the same turn.
void Runtime::handle_qualify_owner(Process& proc, int qualify_node, const Value& owner,
                                   SourcePos pos) {
  ReactorState& rs = *proc.reactor;
  const DagNode& node = rs.dag->nodes[qualify_node];
  if (owner.kind() != ValueKind::ActorRef && owner.kind() != ValueKind::ReactorRef)
    fail(ErrKind::Runtime, pos,
         std::string("qualified value must be an actor or reactor reference, got ") +
             value_kind_name(owner.kind()));
  StreamRefV target = make_stream_ref(owner, node.label, pos);
  if (target.arity != 1)
    fail(ErrKind::Runtime, pos,
         "qualification of stream '" + node.label + "' of arity " +
             std::to_string(target.arity) + "; only arity-1 streams can be qualified");

  QualifyBinding& qb = rs.qualify_bindings[qualify_node];
  std::optional<std::vector<Value>> seed;
  {
    auto lk = lock_shared();
    if (qb.current)
      unsubscribe_reactor(qb.current->owner_pid, qb.current->stream, proc.pid, true,
                          qualify_node);
    qb.generation = rs.next_generation++;
    qb.current = target;
    subscribe_reactor(target.owner_pid, target.stream,
                      ReactorSub{proc.pid, true, qualify_node, 1, qb.generation}, &seed,
                      pos);
  }
  int implicit = node.paired;
  if (seed) {
    rs.slots[implicit] = deep_copy((*seed)[0]);
    rs.changed_stamp[implicit] = rs.turn_id;
    rs.turn_seeds.emplace_back(implicit, *rs.slots[implicit]);
  } else if (rs.slots[implicit]) {
    rs.slots[implicit].reset();
    rs.changed_stamp[implicit] = rs.turn_id;
  }
}

void Runtime::subscribe_reactor(uint64_t producer_pid, const std::string& stream,
                                ReactorSub sub, std::optional<std::vector<Value>>* seed,
                                SourcePos pos) {
  Process& producer = process_at(producer_pid, pos);
  auto it = producer.streams.find(stream);
  if (it == producer.streams.end())
    fail(ErrKind::Runtime, pos,
         producer.behaviour_name + " does not export a stream named '" + stream + "'");
  it->second.reactor_subs.push_back(sub);
  if (seed) *seed = it->second.last;
}

void Runtime::unsubscribe_reactor(uint64_t producer_pid, const std::string& stream,
                                  uint64_t consumer, bool to_implicit, int target) {
  if (producer_pid >= processes_.size()) return;
  Process& producer = *processes_[producer_pid];
  auto it = producer.streams.find(stream);
  if (it == producer.streams.end()) return;
  auto& subs = it->second.reactor_subs;
  subs.erase(std::remove_if(subs.begin(), subs.end(),
                            [&](const ReactorSub& s) {
                              return s.consumer == consumer &&
                                     s.to_implicit == to_implicit && s.target == target;
                            }),
             subs.end());
}

// At spawn time a reactor is only waiting for data, but qualifications whose
// owner is a constant already know their stream: set up those subscriptions
// and precompute everything reachable from constants alone.
void Runtime::init_const_qualifies(Process& proc) {
  ReactorState& rs = *proc.reactor;
  const Dag& dag = *rs.dag;
  for (size_t id = 0; id < dag.nodes.size(); id++)
    if (dag.nodes[id].kind == NodeKind::Const)
      rs.slots[id] = dag.nodes[id].const_value;

  EvalContext cx = make_eval_context(proc);
  Activation act;
  act.kind = ActKind::DagApply;
  act.pure = true;
  act.class_name = proc.behaviour_name;
  act.selector = "propagate";

  for (int id : dag.sched_order) {
    const DagNode& n = dag.nodes[id];
    if (n.inputs.empty()) continue;
    bool all_set = true;
    for (int in : n.inputs)
      if (!rs.slots[in]) {
        all_set = false;
        break;
      }
    if (!all_set) continue;
    switch (n.kind) {
      case NodeKind::Qualify:
        handle_qualify_owner(proc, id, *rs.slots[n.inputs[0]], n.pos);
        rs.slots[id] = *rs.slots[n.inputs[0]];
        break;
      case NodeKind::Apply: {
        std::vector<Value> args;
        for (size_t i = 1; i < n.inputs.size(); i++) args.push_back(*rs.slots[n.inputs[i]]);
        rs.slots[id] = invoke(*rs.slots[n.inputs[0]], n.label, std::move(args), act, cx,
                              n.pos);
        break;
      }
      case NodeKind::Sink:
        rs.slots[id] = *rs.slots[n.inputs[0]];
        break;
      default:
        break;
    }
  }
}

void Runtime::handle_rebind(Process& proc, Message& msg) {
  ReactorState& rs = *proc.reactor;
  const Dag& dag = *rs.dag;

  auto kill_binding = [&](int index) {
    std::shared_ptr<SourceBinding> b = rs.index_binding[index];
    if (!b) return;
    unsubscribe_reactor(b->producer, b->stream, proc.pid, false, b->start);
    for (int i = b->start; i < b->start + b->width; i++) rs.index_binding[i] = nullptr;
  };

  {
    auto lk = lock_shared();
    int cursor = 0;
    for (auto& arg : msg.values) {
      if (arg.kind() == ValueKind::StreamRef) {
        const StreamRefV& ref = arg.as_stream_ref();
        int k = ref.arity;
        for (int i = cursor; i < cursor + k; i++) kill_binding(i);
        auto binding = std::make_shared<SourceBinding>();
        binding->producer = ref.owner_pid;
        binding->stream = ref.stream;
        binding->start = cursor;
        binding->width = k;
        binding->generation = rs.next_generation++;
        std::optional<std::vector<Value>> seed;
        subscribe_reactor(ref.owner_pid, ref.stream,
                          ReactorSub{proc.pid, false, cursor, k, binding->generation},
                          &seed, SourcePos{});
        for (int i = 0; i < k; i++) {
          rs.index_binding[cursor + i] = binding;
          int node = dag.explicit_sources[cursor + i];
          if (seed) {
            rs.staged_sets.emplace_back(node, deep_copy((*seed)[i]));
          } else {
            rs.staged_unsets.push_back(node);
          }
        }
        cursor += k;
      } else {
        kill_binding(cursor);
        rs.staged_sets.emplace_back(dag.explicit_sources[cursor], std::move(arg));
        cursor += 1;
      }
    }
  }
  propagate(proc);
}

void Runtime::handle_publication(Process& proc, Message& msg) {
  ReactorState& rs = *proc.reactor;
  const Dag& dag = *rs.dag;
  bool live = false;
  if (msg.to_implicit) {
    auto it = rs.qualify_bindings.find(msg.target);
    live = it != rs.qualify_bindings.end() && it->second.generation == msg.generation;
    if (live) {
      int implicit = dag.nodes[msg.target].paired;
      rs.staged_sets.emplace_back(implicit, std::move(msg.values[0]));
    }
  } else {
    const auto& b = rs.index_binding[msg.target];
    live = b && b->start == msg.target && b->width == msg.width &&
           b->generation == msg.generation;
    if (live) {
      for (int i = 0; i < msg.width; i++)
        rs.staged_sets.emplace_back(dag.explicit_sources[b->start + i],
                                    std::move(msg.values[i]));
    }
  }
  if (!live) {
    {
      auto lk = lock_shared();
      stats.stale_publications_dropped++;
    }
    if (options_.observer) options_.observer->on_stale_drop(proc.pid);
    if (options_.trace_propagation)
      trace("stale publication dropped at " + proc.debug_name());
    return;
  }
  propagate(proc);
}

void Runtime::propagate(Process& proc) {
  ReactorState& rs = *proc.reactor;
  const Dag& dag = *rs.dag;
  rs.turn_id++;
  const uint64_t T = rs.turn_id;

  PropagationReport report;
  report.reactor_pid = proc.pid;
  report.reactor_name = proc.behaviour_name;

  for (auto& [node, value] : rs.staged_sets) {
    rs.slots[node] = std::move(value);
    rs.changed_stamp[node] = T;
    report.changed_sources.emplace_back(node, *rs.slots[node]);
  }
  for (int node : rs.staged_unsets) {
    if (rs.slots[node]) {
      rs.slots[node].reset();
      rs.changed_stamp[node] = T;
    }
    report.staged_unset_sources.push_back(node);
  }
  rs.staged_sets.clear();
  rs.staged_unsets.clear();
  rs.turn_seeds.clear(); // seeds from spawn-time subscription setup

  EvalContext cx = make_eval_context(proc);
  Activation act;
  act.kind = ActKind::DagApply;
  act.pure = true;
  act.class_name = proc.behaviour_name;
  act.selector = "propagate";

  // Height-ordered sweep (the scheduling rank additionally orders each
  // implicit source after its qualify node, so a seed written mid-turn lands
  // before any consumer of that implicit source runs).
  for (int id : dag.sched_order) {
    const DagNode& n = dag.nodes[id];
    if (n.kind == NodeKind::Source || n.kind == NodeKind::ImplicitSource ||
        n.kind == NodeKind::Const)
      continue;
    bool any_changed = false;
    bool all_set = true;
    for (int in : n.inputs) {
      if (rs.changed_stamp[in] == T) any_changed = true;
      if (!rs.slots[in]) all_set = false;
    }
    if (!any_changed) continue;
    if (n.kind == NodeKind::Qualify) {
      if (!all_set) continue;
      handle_qualify_owner(proc, id, *rs.slots[n.inputs[0]], n.pos);
      rs.slots[id] = *rs.slots[n.inputs[0]];
      report.recomputed.push_back(id);
      continue;
    }
    if (!all_set) {
      // An unset input poisons the node so a later turn cannot emit a tuple
      // mixing live and stale branches.
      if (rs.slots[id]) {
        rs.slots[id].reset();
        rs.changed_stamp[id] = T;
      }
      continue;
    }
    Value newv;
    if (n.kind == NodeKind::Apply) {
      std::vector<Value> args;
      args.reserve(n.inputs.size() - 1);
      for (size_t i = 1; i < n.inputs.size(); i++) args.push_back(*rs.slots[n.inputs[i]]);
      newv = invoke(*rs.slots[n.inputs[0]], n.label, std::move(args), act, cx, n.pos);
    } else { // Sink
      newv = *rs.slots[n.inputs[0]];
    }
    bool changed = !rs.slots[id] || !equals(*rs.slots[id], newv);
    rs.slots[id] = std::move(newv);
    if (changed) rs.changed_stamp[id] = T;
    report.recomputed.push_back(id);
  }

  for (auto& [node, value] : rs.turn_seeds)
    report.changed_sources.emplace_back(node, std::move(value));
  rs.turn_seeds.clear();

  bool all_sinks_set = true;
  bool any_sink_changed = false;
  for (int sink : dag.sinks) {
    if (!rs.slots[sink]) all_sinks_set = false;
    if (rs.changed_stamp[sink] == T) any_sink_changed = true;
  }
  if (all_sinks_set && (any_sink_changed || !rs.ever_emitted)) {
    std::vector<Value> tuple;
    tuple.reserve(dag.sinks.size());
    for (int sink : dag.sinks) tuple.push_back(*rs.slots[sink]);
    rs.ever_emitted = true;
    report.emitted = true;
    report.tuple = tuple;
    emit_to_subscribers(proc, "out", proc.streams.at("out"), std::move(tuple));
  }
  {
    auto lk = lock_shared();
    stats.propagations++;
  }

  if (options_.trace_propagation) {
    std::string line = "propagate " + proc.debug_name() + " changed";
    for (const auto& [node, value] : report.changed_sources)
      line += " " + std::to_string(node) + "=" + display(value);
    for (int node : report.staged_unset_sources)
      line += " " + std::to_string(node) + "=unset";
    line += " recomputed [";
    for (size_t i = 0; i < report.recomputed.size(); i++) {
      if (i) line += " ";
      line += std::to_string(report.recomputed[i]);
    }
    line += "]";
    line += report.emitted ? " emit " + tuple_str(report.tuple) : " (no emission)";
    trace(line);
  }
  if (options_.observer) options_.observer->on_propagation(report);
}

} // namespace arlang
