#pragma once

#include <memory>
#include <string>

#include "program.hpp"
#include "runtime.hpp"

namespace testsupport {

struct RunResult {
  // 0 = clean exit, 1 = load error, 2 = run-time error.
  int code = 0;
  std::string out;
  std::string err;
  std::string error; // diagnostic when code != 0
  arlang::RunStats stats;
};

struct RunSpec {
  arlang::RunOptions::Scheduler scheduler =
      arlang::RunOptions::Scheduler::Deterministic;
  bool has_seed = false;
  uint64_t seed = 0;
  uint64_t max_turns = 0;
  bool trace_propagation = false;
  bool trace_sct = false;
  arlang::PropagationObserver* observer = nullptr;
};

// Loads and runs a program, capturing output. Load errors yield code 1.
RunResult run_source(const std::string& source, const RunSpec& spec = {});

// Runs an already loaded program.
RunResult run_program(const arlang::Program& program, const RunSpec& spec = {});

std::string read_file(const std::string& path);
std::string corpus_path(const std::string& name);
std::string golden_path(const std::string& name);

} // namespace testsupport
