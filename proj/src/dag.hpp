#pragma once

#include <string>
#include <vector>

#include "value.hpp"

namespace arlang {

class Program;

enum class NodeKind { Source, ImplicitSource, Const, Apply, Qualify, Sink };

const char* node_kind_name(NodeKind k);

struct DagNode {
  NodeKind kind;
  // Source: parameter name; Apply: selector; Qualify: stream name.
  std::string label;
  Value const_value; // Const only, computed at compile time
  std::vector<int> inputs;
  int paired = -1; // Qualify <-> ImplicitSource pairing
  // Height over data edges; sources and consts sit at 0.
  int height = 0;
  // Scheduling rank: topological height over data edges plus the
  // qualify -> implicit-source pairing edges, so a seed written by a qualify
  // node always lands before any consumer of its implicit source runs.
  int sched = 0;
  SourcePos pos;
};

struct Dag {
  std::string name;
  std::vector<DagNode> nodes;
  std::vector<int> explicit_sources; // parameter order
  std::vector<int> implicit_sources; // textual body order, after explicit
  std::vector<int> sinks;
  std::vector<std::vector<std::pair<int, int>>> consumers; // id -> (consumer, slot)
  std::vector<int> sched_order; // node ids sorted by (sched, id)

  int explicit_source_count() const { return static_cast<int>(explicit_sources.size()); }
  int sink_count() const { return static_cast<int>(sinks.size()); }
};

// Compiles one reactor behaviour (following tick/ror references through the
// program, memoised in program.dags). Throws Error(ErrKind::Compile).
const Dag& compile_reactor(Program& program, const std::string& name);

// Compiles every reactor behaviour in the program.
void compile_all_reactors(Program& program);

// Stable textual rendering used by the dump-dag command and shape tests.
std::string dump_dag(const Dag& dag);

} // namespace arlang
