#include "runtime.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace arlang {

namespace {

void write_stdout(const std::string& s) {
  std::fwrite(s.data(), 1, s.size(), stdout);
  std::fflush(stdout);
}

void write_stderr(const std::string& s) {
  std::fwrite(s.data(), 1, s.size(), stderr);
  std::fflush(stderr);
}

constexpr size_t kInterpStackBytes = 64u << 20;

} // namespace

void* InterpThread::trampoline(void* arg) {
  auto* self = static_cast<InterpThread*>(arg);
  try {
    self->fn_();
  } catch (...) {
    self->error_ = std::current_exception();
  }
  return nullptr;
}

void InterpThread::start(std::function<void()> fn, size_t stack_bytes) {
  fn_ = std::move(fn);
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  started_ = pthread_create(&handle_, &attr, trampoline, this) == 0;
  pthread_attr_destroy(&attr);
  if (!started_) {
    // Could not spawn a dedicated flow; run inline on the caller's stack.
    try {
      fn_();
    } catch (...) {
      error_ = std::current_exception();
    }
  }
}

void InterpThread::join() {
  if (started_) {
    pthread_join(handle_, nullptr);
    started_ = false;
  }
}

Runtime::Runtime(const Program& program, RunOptions options)
    : program_(program), options_(std::move(options)) {
  concurrent_ = options_.scheduler == RunOptions::Scheduler::Concurrent;
  if (!options_.out) options_.out = write_stdout;
  if (!options_.err) options_.err = write_stderr;
  rng_.seed(options_.has_seed ? options_.seed : std::random_device{}());
}

Runtime::~Runtime() {
  stopping_ = true;
  for (auto& p : processes_) p->cv.notify_all();
  for (auto& p : processes_) p->worker.join();
}

void Runtime::trace(const std::string& line) {
  std::lock_guard<std::mutex> g(out_mu_);
  options_.err(line + "\n");
}

void Runtime::write_line(const std::string& line) {
  std::lock_guard<std::mutex> g(out_mu_);
  options_.out(line + "\n");
}

EvalContext Runtime::make_eval_context(Process& proc) {
  EvalContext cx{program_, this, &proc, &proc.guard};
  cx.max_depth = options_.max_eval_depth;
  return cx;
}

Process& Runtime::process_at(uint64_t pid, SourcePos pos) {
  auto lk = lock_shared();
  if (pid >= processes_.size())
    fail(ErrKind::Runtime, pos, "reference to unknown process " + std::to_string(pid));
  return *processes_[pid];
}

Process& Runtime::add_process(std::unique_ptr<Process> p) {
  auto lk = lock_shared();
  p->pid = processes_.size();
  Process& ref = *p;
  processes_.push_back(std::move(p));
  if (options_.trace_sct)
    ref.guard.set_trace([this](const std::string& line) { trace(line); });
  if (concurrent_) start_worker(ref);
  return ref;
}

void Runtime::enqueue(Process& target, Message msg, double timestamp) {
  msg.timestamp = timestamp;
  {
    auto lk = lock_shared();
    stats.messages_sent++;
    pending_work_++;
    msg.seq = next_seq_++;
  }
  if (concurrent_) {
    {
      std::lock_guard<std::mutex> g(target.mu);
      target.mailbox.push(std::move(msg));
    }
    target.cv.notify_one();
    return;
  }
  target.mailbox.push(std::move(msg));
}

// --- spawning -----------------------------------------------------------------

Value Runtime::spawn_actor(const std::string& behaviour, const std::string& ctor,
                           std::vector<Value> args, Process& spawner, SourcePos pos) {
  const ActorBehaviourDef* def = program_.defs.find_actor(behaviour);
  if (!def)
    fail(ErrKind::Runtime, pos, "unknown actor behaviour '" + behaviour + "'");
  const MemberDef* member = def->find_member(ctor);
  if (!member || member->kind != MemberKind::Constructor)
    fail(ErrKind::Runtime, pos,
         "unknown constructor '" + ctor + "' on actor behaviour " + behaviour);

  auto proc = std::make_unique<Process>();
  proc->behaviour_name = behaviour;
  proc->actor_def = def;
  proc->fields.assign(def->fields.size(), Value::undefined());
  proc->local_time = spawner.local_time;
  for (const auto& s : def->streams) proc->streams[s.name].arity = s.arity;

  Message construct;
  construct.kind = Message::Kind::Construct;
  construct.selector = ctor;
  for (auto& a : args) construct.values.push_back(deep_copy(a));

  Process& created = add_process(std::move(proc));
  {
    auto lk = lock_shared();
    stats.actors_spawned++;
  }
  enqueue(created, std::move(construct), spawner.local_time);
  return Value::actor_ref(created.pid);
}

Value Runtime::spawn_reactor(const std::string& behaviour, Process& spawner,
                             SourcePos pos) {
  const Dag* dag = program_.find_dag(behaviour);
  if (!dag)
    fail(ErrKind::Runtime, pos, "unknown reactor behaviour '" + behaviour + "'");

  auto proc = std::make_unique<Process>();
  proc->behaviour_name = behaviour;
  proc->is_reactor = true;
  proc->constructed = true;
  proc->local_time = spawner.local_time;
  proc->reactor = std::make_unique<ReactorState>();
  ReactorState& rs = *proc->reactor;
  rs.dag = dag;
  rs.slots.assign(dag->nodes.size(), std::nullopt);
  rs.changed_stamp.assign(dag->nodes.size(), 0);
  rs.index_binding.assign(dag->explicit_sources.size(), nullptr);
  proc->streams["out"].arity = dag->sink_count();

  Process& created = add_process(std::move(proc));
  {
    auto lk = lock_shared();
    stats.reactors_spawned++;
  }
  init_const_qualifies(created);
  return Value::reactor_ref(created.pid);
}

// --- messaging ------------------------------------------------------------------

void Runtime::send_invoke(const Value& target, const std::string& selector,
                          std::vector<Value> args, Process& sender, SourcePos pos) {
  if (target.kind() == ValueKind::ReactorRef)
    fail(ErrKind::Runtime, pos,
         "reactors cannot receive messages; compose with react-to and monitor");
  if (target.kind() != ValueKind::ActorRef)
    fail(ErrKind::Runtime, pos,
         std::string("send expects an actor reference, got ") +
             value_kind_name(target.kind()));
  Message msg;
  msg.kind = Message::Kind::Invoke;
  msg.selector = selector;
  for (auto& a : args) msg.values.push_back(deep_copy(a));
  Process& t = process_at(target.as_actor_ref().pid, pos);
  enqueue(t, std::move(msg), sender.local_time);
}

void Runtime::emit_stream(Process& producer, const std::string& stream,
                          std::vector<Value> tuple, SourcePos pos) {
  if (producer.is_reactor)
    fail(ErrKind::Runtime, pos, "emit is only available to actors");
  auto lk = lock_shared();
  auto it = producer.streams.find(stream);
  if (it == producer.streams.end())
    fail(ErrKind::Runtime, pos,
         producer.behaviour_name + " does not declare a stream named '" + stream + "'");
  StreamState& state = it->second;
  if (static_cast<int>(tuple.size()) != state.arity)
    fail(ErrKind::Runtime, pos,
         "emit provides " + std::to_string(tuple.size()) + " value(s) for stream '" +
             stream + "' of arity " + std::to_string(state.arity));
  emit_to_subscribers(producer, stream, state, std::move(tuple));
}

void Runtime::emit_to_subscribers(Process& producer, const std::string& stream,
                                  StreamState& state, std::vector<Value> tuple) {
  (void)stream;
  auto lk = lock_shared();
  stats.stream_emissions++;
  for (const auto& sub : state.monitors) {
    Message msg;
    msg.kind = Message::Kind::Invoke;
    msg.selector = sub.selector;
    for (const auto& v : tuple) msg.values.push_back(deep_copy(v));
    stats.publications_delivered++;
    enqueue(*processes_[sub.consumer], std::move(msg), producer.local_time);
  }
  for (const auto& sub : state.reactor_subs) {
    Message msg;
    msg.kind = Message::Kind::Publication;
    msg.to_implicit = sub.to_implicit;
    msg.target = sub.target;
    msg.width = sub.width;
    msg.generation = sub.generation;
    for (const auto& v : tuple) msg.values.push_back(deep_copy(v));
    stats.publications_delivered++;
    enqueue(*processes_[sub.consumer], std::move(msg), producer.local_time);
  }
  state.last = std::move(tuple);
}

StreamRefV Runtime::make_stream_ref(const Value& owner, const std::string& stream,
                                    SourcePos pos) {
  auto lk = lock_shared();
  if (owner.kind() == ValueKind::ActorRef) {
    Process& p = process_at(owner.as_actor_ref().pid, pos);
    auto it = p.streams.find(stream);
    if (it == p.streams.end())
      fail(ErrKind::Runtime, pos,
           p.behaviour_name + " does not export a stream named '" + stream + "'");
    return StreamRefV{p.pid, false, stream, it->second.arity};
  }
  if (owner.kind() == ValueKind::ReactorRef) {
    Process& p = process_at(owner.as_reactor_ref().pid, pos);
    if (stream != "out")
      fail(ErrKind::Runtime, pos,
           "reactors export exactly one stream named 'out', not '" + stream + "'");
    return StreamRefV{p.pid, true, stream, p.streams.at("out").arity};
  }
  fail(ErrKind::Runtime, pos,
       std::string("qualification needs an actor or reactor reference, got ") +
           value_kind_name(owner.kind()));
}

void Runtime::monitor_stream(Process& consumer, const StreamRefV& stream,
                             const std::string& selector, SourcePos pos) {
  if (consumer.is_reactor)
    fail(ErrKind::Runtime, pos, "monitor is only available to actors");
  auto lk = lock_shared();
  Process& producer = process_at(stream.owner_pid, pos);
  auto it = producer.streams.find(stream.stream);
  if (it == producer.streams.end())
    fail(ErrKind::Runtime, pos,
         producer.behaviour_name + " does not export a stream named '" +
             stream.stream + "'");
  StreamState& state = it->second;
  state.monitors.push_back({consumer.pid, selector});
  if (state.last) {
    // A stream that has already emitted seeds the new subscriber with the
    // cached tuple as an immediate first publication.
    Message msg;
    msg.kind = Message::Kind::Invoke;
    msg.selector = selector;
    for (const auto& v : *state.last) msg.values.push_back(deep_copy(v));
    stats.publications_delivered++;
    enqueue(consumer, std::move(msg), consumer.local_time);
  }
}

void Runtime::react_to(Process& caller, const Value& target, std::vector<Value> args,
                       SourcePos pos) {
  if (caller.is_reactor)
    fail(ErrKind::Runtime, pos, "react-to is only available to actors");
  if (target.kind() != ValueKind::ReactorRef)
    fail(ErrKind::Runtime, pos,
         std::string("react-to expects a reactor reference, got ") +
             value_kind_name(target.kind()));
  auto lk = lock_shared();
  Process& reactor = process_at(target.as_reactor_ref().pid, pos);
  int needed = reactor.reactor->dag->explicit_source_count();
  int provided = 0;
  for (const auto& a : args)
    provided += a.kind() == ValueKind::StreamRef ? a.as_stream_ref().arity : 1;
  if (provided != needed)
    fail(ErrKind::Runtime, pos,
         "react-to covers " + std::to_string(provided) + " of " +
             std::to_string(needed) + " source(s) of " + reactor.behaviour_name);
  Message msg;
  msg.kind = Message::Kind::Rebind;
  for (auto& a : args) msg.values.push_back(deep_copy(a));
  enqueue(reactor, std::move(msg), caller.local_time);
}

void Runtime::sleep_for(Process& proc, double ms) {
  if (concurrent_) {
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    return;
  }
  proc.local_time += ms;
}

double Runtime::random_integer_between(double lo, double hi, SourcePos pos) {
  if (lo != std::floor(lo) || hi != std::floor(hi) || lo > hi)
    fail(ErrKind::Runtime, pos, "integer-between needs whole bounds with lo <= hi");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  auto lk = lock_shared();
  return lo + static_cast<double>(rng_() % span);
}

// --- turns ----------------------------------------------------------------------

void Runtime::run_actor_message(Process& proc, const Message& msg) {
  const ActorBehaviourDef* def = proc.actor_def;
  const MemberDef* member = def->find_member(msg.selector);
  if (msg.kind == Message::Kind::Construct) {
    proc.constructed = true;
  } else if (member && member->kind == MemberKind::Constructor) {
    fail(ErrKind::Runtime, member->pos,
         "constructor '" + msg.selector + "' can only run as the first message");
  }
  if (!member)
    fail(ErrKind::Runtime, SourcePos{},
         def->name + " has no method '" + msg.selector + "'");
  if (member->params.size() != msg.values.size())
    fail(ErrKind::Runtime, member->pos,
         def->name + "." + msg.selector + " expects " +
             std::to_string(member->params.size()) + " argument(s), got " +
             std::to_string(msg.values.size()));

  Activation act;
  act.kind = msg.kind == Message::Kind::Construct ? ActKind::Constructor : ActKind::Method;
  act.pure = false;
  act.class_name = def->name;
  act.selector = msg.selector;
  act.receiver = Value::actor_ref(proc.pid);
  act.fields = &proc.fields;
  act.field_names = &def->fields;
  act.call_pos = member->pos;

  Scope scope;
  for (size_t i = 0; i < member->params.size(); i++)
    scope.define(member->params[i], msg.values[i]);

  EvalContext cx = make_eval_context(proc);
  eval_body(member->body, scope, act, cx);
}

void Runtime::dispatch(Process& proc, Message& msg) {
  try {
    switch (msg.kind) {
      case Message::Kind::Construct:
      case Message::Kind::Invoke:
        if (proc.is_reactor)
          fail(ErrKind::Runtime, SourcePos{}, "reactors cannot process method messages");
        run_actor_message(proc, msg);
        break;
      case Message::Kind::Publication:
        handle_publication(proc, msg);
        break;
      case Message::Kind::Rebind:
        handle_rebind(proc, msg);
        break;
    }
  } catch (const Error& e) {
    std::string where = "in " + proc.debug_name();
    if (!msg.selector.empty()) where += " processing '" + msg.selector + "'";
    throw Error(e.kind(), e.pos(), where + ": " + e.message());
  }
}

// --- deterministic scheduler ------------------------------------------------------

void Runtime::run_deterministic() {
  uint64_t rr_last = UINT64_MAX;
  for (;;) {
    if (options_.max_turns && stats.turns >= options_.max_turns) return;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Process*> tied;
    for (auto& up : processes_) {
      Process* p = up.get();
      if (p->mailbox.empty()) continue;
      double cand = std::max(p->local_time, p->mailbox.top().timestamp);
      if (cand < best) {
        best = cand;
        tied.clear();
        tied.push_back(p);
      } else if (cand == best) {
        tied.push_back(p);
      }
    }
    if (tied.empty()) return; // all mailboxes drained

    // Round-robin among simultaneously runnable processes: the first pid
    // strictly after the previously scheduled one, wrapping around.
    Process* chosen = nullptr;
    if (rr_last != UINT64_MAX) {
      for (Process* p : tied) {
        if (p->pid > rr_last) {
          chosen = p;
          break;
        }
      }
    }
    if (!chosen) chosen = tied.front();

    chosen->local_time = best;
    Message msg = chosen->mailbox.top();
    chosen->mailbox.pop();
    stats.turns++;
    pending_work_--;
    rr_last = chosen->pid;
    dispatch(*chosen, msg);
  }
}

// --- concurrent scheduler ----------------------------------------------------------

void Runtime::start_worker(Process& proc) {
  proc.worker.start([this, &proc] { concurrent_worker(proc); }, kInterpStackBytes);
}

void Runtime::concurrent_worker(Process& proc) {
  for (;;) {
    Message msg;
    {
      std::unique_lock<std::mutex> lk(proc.mu);
      proc.cv.wait(lk, [&] { return stopping_.load() || !proc.mailbox.empty(); });
      if (stopping_) return;
      msg = proc.mailbox.top();
      proc.mailbox.pop();
    }
    {
      auto lk = lock_shared();
      if (options_.max_turns && stats.turns >= options_.max_turns) {
        stopping_ = true;
        idle_cv_.notify_all();
        for (auto& p : processes_) p->cv.notify_all();
        return;
      }
      stats.turns++;
    }
    try {
      dispatch(proc, msg);
    } catch (const Error& e) {
      auto lk = lock_shared();
      if (!first_error_) first_error_ = e;
      stopping_ = true;
      idle_cv_.notify_all();
      for (auto& p : processes_) p->cv.notify_all();
      return;
    }
    {
      auto lk = lock_shared();
      pending_work_--;
      if (pending_work_ == 0) idle_cv_.notify_all();
    }
  }
}

void Runtime::run_concurrent() {
  {
    std::unique_lock<std::recursive_mutex> lk(global_mu_);
    idle_cv_.wait(lk, [&] { return stopping_.load() || pending_work_ == 0; });
    stopping_ = true;
  }
  for (auto& p : processes_) p->cv.notify_all();
  for (auto& p : processes_) p->worker.join();
  std::lock_guard<std::recursive_mutex> g(global_mu_);
  if (first_error_) throw *first_error_;
}

void Runtime::run() {
  // The load step guarantees Main and its start constructor exist.
  const ActorBehaviourDef* def = program_.defs.find_actor("Main");
  auto proc = std::make_unique<Process>();
  proc->behaviour_name = "Main";
  proc->actor_def = def;
  proc->fields.assign(def->fields.size(), Value::undefined());
  for (const auto& s : def->streams) proc->streams[s.name].arity = s.arity;
  Process& main = add_process(std::move(proc));
  stats.actors_spawned++;

  Message construct;
  construct.kind = Message::Kind::Construct;
  construct.selector = "start";
  enqueue(main, std::move(construct), 0);

  if (concurrent_) {
    run_concurrent();
    return;
  }
  InterpThread flow;
  flow.start([this] { run_deterministic(); }, kInterpStackBytes);
  flow.join();
  if (flow.error()) std::rethrow_exception(flow.error());
}

} // namespace arlang
