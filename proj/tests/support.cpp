#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testsupport {

using namespace arlang;

RunResult run_program(const Program& program, const RunSpec& spec) {
  RunResult result;
  RunOptions opts;
  opts.scheduler = spec.scheduler;
  opts.has_seed = spec.has_seed;
  opts.seed = spec.seed;
  opts.max_turns = spec.max_turns;
  opts.trace_propagation = spec.trace_propagation;
  opts.trace_sct = spec.trace_sct;
  opts.observer = spec.observer;
  opts.out = [&result](const std::string& s) { result.out += s; };
  opts.err = [&result](const std::string& s) { result.err += s; };
  Runtime runtime(program, std::move(opts));
  try {
    runtime.run();
    result.code = 0;
  } catch (const Error& e) {
    result.code = e.is_load_error() ? 1 : 2;
    result.error = e.what();
  }
  result.stats = runtime.stats;
  return result;
}

RunResult run_source(const std::string& source, const RunSpec& spec) {
  std::unique_ptr<Program> program;
  try {
    program = Program::load(source);
  } catch (const Error& e) {
    RunResult result;
    result.code = 1;
    result.error = e.what();
    return result;
  }
  return run_program(*program, spec);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string corpus_path(const std::string& name) {
  return std::string(ARLANG_CORPUS_DIR) + "/" + name;
}

std::string golden_path(const std::string& name) {
  return std::string(ARLANG_GOLDEN_DIR) + "/" + name;
}

} // namespace testsupport
