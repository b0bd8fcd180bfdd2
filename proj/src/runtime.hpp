#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <pthread.h>
#include <queue>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "dag.hpp"
#include "eval.hpp"
#include "program.hpp"
#include "value.hpp"

namespace arlang {

// Interpreter flows run on threads with an explicitly sized stack, so the
// evaluator's depth limit is what bounds recursion, not the platform default.
class InterpThread {
public:
  void start(std::function<void()> fn, size_t stack_bytes);
  void join();
  bool joinable() const { return started_; }
  std::exception_ptr error() const { return error_; }

private:
  static void* trampoline(void* arg);
  pthread_t handle_{};
  std::function<void()> fn_;
  std::exception_ptr error_;
  bool started_ = false;
};

struct Message {
  enum class Kind { Construct, Invoke, Publication, Rebind };
  Kind kind;
  std::string selector;      // Construct / Invoke
  std::vector<Value> values; // args, publication tuple, or rebind arguments
  // Publication routing:
  bool to_implicit = false; // true: target is a qualify node id
  int target = -1;          // qualify node id, or first covered source index
  int width = 1;
  uint64_t generation = 0;
  // Delivery order (deterministic mode): ascending (timestamp, seq).
  double timestamp = 0;
  uint64_t seq = 0;
};

struct MonitorSub {
  uint64_t consumer;
  std::string selector;
};

struct ReactorSub {
  uint64_t consumer;
  bool to_implicit;
  int target; // qualify node id or first covered source index
  int width;
  uint64_t generation;
};

struct StreamState {
  int arity = 1;
  std::optional<std::vector<Value>> last;
  std::vector<MonitorSub> monitors;
  std::vector<ReactorSub> reactor_subs;
};

// Subscription of a group of explicit sources to one producer stream.
struct SourceBinding {
  uint64_t producer;
  std::string stream;
  int start;
  int width;
  uint64_t generation;
};

struct QualifyBinding {
  std::optional<StreamRefV> current;
  uint64_t generation = 0;
};

struct ReactorState {
  const Dag* dag = nullptr;
  std::vector<std::optional<Value>> slots;
  std::vector<uint64_t> changed_stamp; // == turn_id when the node changed this turn
  uint64_t turn_id = 0;
  std::vector<std::shared_ptr<SourceBinding>> index_binding; // per explicit source
  std::unordered_map<int, QualifyBinding> qualify_bindings;  // by qualify node id
  uint64_t next_generation = 1;
  bool ever_emitted = false;
  // Changes staged for the next propagation turn.
  std::vector<std::pair<int, Value>> staged_sets;
  std::vector<int> staged_unsets;
  // Implicit-source seeds written by qualify nodes during the current turn.
  std::vector<std::pair<int, Value>> turn_seeds;
};

class Process {
public:
  uint64_t pid = 0;
  std::string behaviour_name;
  bool is_reactor = false;
  bool constructed = false;

  // Actor side.
  const ActorBehaviourDef* actor_def = nullptr;
  std::vector<Value> fields;

  // Streams this process exports (reactors export exactly "out").
  std::map<std::string, StreamState> streams;

  // Reactor side.
  std::unique_ptr<ReactorState> reactor;

  // Virtual time (deterministic mode): the process's own clock. Advanced by
  // sleep during a turn; the process takes no further turn before it.
  double local_time = 0;

  GuardStack guard;

  // Mailbox: min-heap on (timestamp, seq) in deterministic mode; FIFO order
  // coincides because senders stamp nondecreasing times.
  struct MsgOrder {
    bool operator()(const Message& a, const Message& b) const {
      if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
      return a.seq > b.seq;
    }
  };
  std::priority_queue<Message, std::vector<Message>, MsgOrder> mailbox;

  // Concurrent mode.
  std::mutex mu;
  std::condition_variable cv;
  InterpThread worker;

  std::string debug_name() const {
    return behaviour_name + "#" + std::to_string(pid);
  }
};

struct PropagationReport {
  uint64_t reactor_pid = 0;
  std::string reactor_name;
  std::vector<std::pair<int, Value>> changed_sources; // staged unsets omitted
  std::vector<int> staged_unset_sources;
  std::vector<int> recomputed; // node ids in processing order
  bool emitted = false;
  std::vector<Value> tuple;
};

class PropagationObserver {
public:
  virtual ~PropagationObserver() = default;
  virtual void on_propagation(const PropagationReport&) {}
  virtual void on_stale_drop(uint64_t /*reactor_pid*/) {}
};

struct RunOptions {
  enum class Scheduler { Deterministic, Concurrent };
  Scheduler scheduler = Scheduler::Deterministic;
  bool has_seed = false;
  uint64_t seed = 0;
  uint64_t max_turns = 0; // 0 = unbounded
  bool trace_propagation = false;
  bool trace_sct = false;
  int max_eval_depth = 4096;
  std::function<void(const std::string&)> out; // program output; default stdout
  std::function<void(const std::string&)> err; // traces + diagnostics; default stderr
  PropagationObserver* observer = nullptr;
};

struct RunStats {
  uint64_t turns = 0;
  uint64_t messages_sent = 0;
  uint64_t publications_delivered = 0;
  uint64_t stale_publications_dropped = 0;
  uint64_t propagations = 0;
  uint64_t stream_emissions = 0;
  uint64_t actors_spawned = 0;
  uint64_t reactors_spawned = 0;
};

// The scheduler and process registry for one run of a loaded program.
class Runtime {
public:
  Runtime(const Program& program, RunOptions options);
  ~Runtime();

  // Spawns Main via its start constructor and drives the scheduler until all
  // mailboxes drain or max_turns is reached. Throws Error on abort.
  void run();

  RunStats stats;

  // --- operations invoked from evaluated code ---------------------------------

  Value spawn_actor(const std::string& behaviour, const std::string& ctor,
                    std::vector<Value> args, Process& spawner, SourcePos pos);
  Value spawn_reactor(const std::string& behaviour, Process& spawner, SourcePos pos);
  void send_invoke(const Value& target, const std::string& selector,
                   std::vector<Value> args, Process& sender, SourcePos pos);
  void emit_stream(Process& producer, const std::string& stream,
                   std::vector<Value> tuple, SourcePos pos);
  StreamRefV make_stream_ref(const Value& owner, const std::string& stream,
                             SourcePos pos);
  void monitor_stream(Process& consumer, const StreamRefV& stream,
                      const std::string& selector, SourcePos pos);
  void react_to(Process& caller, const Value& target, std::vector<Value> args,
                SourcePos pos);
  void sleep_for(Process& proc, double ms);
  double random_integer_between(double lo, double hi, SourcePos pos);
  void write_line(const std::string& line);

  const Program& program() const { return program_; }
  const RunOptions& options() const { return options_; }

private:
  friend class ReactorOps;

  const Program& program_;
  RunOptions options_;

  std::vector<std::unique_ptr<Process>> processes_;
  uint64_t next_seq_ = 0;
  std::mt19937_64 rng_;

  // Concurrent mode bookkeeping. Shared state (registry, subscriptions,
  // stats, pending-work count) lives behind one recursive lock; turns
  // themselves run outside it so a sleeping process blocks nobody else.
  bool concurrent_ = false;
  std::recursive_mutex global_mu_;
  std::condition_variable_any idle_cv_;
  int64_t pending_work_ = 0; // queued messages + turns in flight
  std::atomic<bool> stopping_{false};
  std::optional<Error> first_error_;
  std::mutex out_mu_;

  // No-op in deterministic mode (single flow).
  std::unique_lock<std::recursive_mutex> lock_shared() {
    return concurrent_ ? std::unique_lock<std::recursive_mutex>(global_mu_)
                       : std::unique_lock<std::recursive_mutex>();
  }

  Process& process_at(uint64_t pid, SourcePos pos);
  Process& add_process(std::unique_ptr<Process> p);
  void enqueue(Process& target, Message msg, double timestamp);
  void dispatch(Process& proc, Message& msg);
  void run_actor_message(Process& proc, const Message& msg);

  void run_deterministic();
  void run_concurrent();
  void concurrent_worker(Process& proc);
  void start_worker(Process& proc);

  // Reactor message handling (runtime_reactor.cpp).
  void handle_rebind(Process& proc, Message& msg);
  void handle_publication(Process& proc, Message& msg);
  void handle_qualify_owner(Process& proc, int qualify_node, const Value& owner,
                            SourcePos pos);
  void propagate(Process& proc);
  void init_const_qualifies(Process& proc);

  // Stream plumbing; callers hold global_mu_ in concurrent mode.
  void subscribe_reactor(uint64_t producer_pid, const std::string& stream,
                         ReactorSub sub, std::optional<std::vector<Value>>* seed,
                         SourcePos pos);
  void unsubscribe_reactor(uint64_t producer_pid, const std::string& stream,
                           uint64_t consumer, bool to_implicit, int target);
  void emit_to_subscribers(Process& producer, const std::string& stream,
                           StreamState& state, std::vector<Value> tuple);

  EvalContext make_eval_context(Process& proc);
  void trace(const std::string& line);
};

} // namespace arlang
