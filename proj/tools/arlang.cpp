// arlang command line driver. Talks to the runtime exclusively through the
// public C API in arlang/arlang.h.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "arlang/arlang.h"

namespace {

int exit_code_for(arl_status status) {
  switch (status) {
    case ARL_OK: return 0;
    case ARL_ERR_LOAD: return 1;
    case ARL_ERR_RUNTIME: return 2;
    default: return 3;
  }
}

int report(arl_status status) {
  if (status != ARL_OK) std::fprintf(stderr, "arlang: %s\n", arl_last_error());
  return exit_code_for(status);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpreter for the arlang actor-reactor language"};
  app.require_subcommand(1);

  std::string run_file;
  std::string scheduler = "deterministic";
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::uint64_t max_turns = 0;
  bool trace_propagation = false;
  bool trace_sct = false;

  CLI::App* run = app.add_subcommand("run", "Load a program and run its Main actor");
  run->add_option("file", run_file, "Program file (.arl)")->required();
  run->add_option("--scheduler", scheduler, "Scheduling mode")
      ->check(CLI::IsMember({"deterministic", "concurrent"}))
      ->capture_default_str();
  run->add_option("--seed", seed, "Fix the random number generator")
      ->each([&](const std::string&) { has_seed = true; });
  run->add_option("--max-turns", max_turns, "Total turn budget (0 = unbounded)")
      ->capture_default_str();
  run->add_flag("--trace-propagation", trace_propagation,
                "Trace reactor propagation turns on stderr");
  run->add_flag("--trace-sct", trace_sct,
                "Trace termination-guard comparisons on stderr");

  std::string dump_file;
  std::string dump_behaviour;
  CLI::App* dump = app.add_subcommand("dump-dag",
                                      "Print the compiled graph of a reactor behaviour");
  dump->add_option("file", dump_file, "Program file (.arl)")->required();
  dump->add_option("behaviour", dump_behaviour, "Reactor behaviour name")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    arl_program* prog = nullptr;
    arl_status status = arl_program_load_file(run_file.c_str(), &prog);
    if (status != ARL_OK) return report(status);

    arl_run_options opts;
    arl_run_options_init(&opts);
    opts.scheduler = scheduler == "concurrent" ? ARL_SCHED_CONCURRENT
                                               : ARL_SCHED_DETERMINISTIC;
    opts.has_seed = has_seed ? 1 : 0;
    opts.seed = seed;
    opts.max_turns = max_turns;
    opts.trace_propagation = trace_propagation ? 1 : 0;
    opts.trace_sct = trace_sct ? 1 : 0;

    status = arl_run(prog, &opts, nullptr);
    arl_program_free(prog);
    return report(status);
  }

  arl_program* prog = nullptr;
  arl_status status = arl_program_load_file(dump_file.c_str(), &prog);
  if (status != ARL_OK) return report(status);
  char* text = nullptr;
  status = arl_dump_dag(prog, dump_behaviour.c_str(), &text);
  if (status == ARL_OK) {
    std::fputs(text, stdout);
    arl_string_free(text);
  }
  arl_program_free(prog);
  return report(status);
}
