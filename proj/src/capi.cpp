#include "arlang/arlang.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "program.hpp"
#include "runtime.hpp"

using namespace arlang;

struct arl_program {
  std::unique_ptr<Program> program;
};

namespace {

thread_local std::string tl_error;

void set_error(const std::string& msg) { tl_error = msg; }

arl_status status_for(const Error& e) {
  return e.is_load_error() ? ARL_ERR_LOAD : ARL_ERR_RUNTIME;
}

arl_status load_text(const std::string& text, arl_program** out) {
  if (!out) return ARL_ERR_ARG;
  *out = nullptr;
  try {
    auto handle = std::make_unique<arl_program>();
    handle->program = Program::load(text);
    *out = handle.release();
    return ARL_OK;
  } catch (const Error& e) {
    set_error(e.what());
    return status_for(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return ARL_ERR_LOAD;
  }
}

} // namespace

extern "C" {

void arl_run_options_init(arl_run_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->scheduler = ARL_SCHED_DETERMINISTIC;
}

arl_status arl_program_load(const char* source, size_t len, arl_program** out) {
  if (!source) {
    set_error("source is null");
    return ARL_ERR_ARG;
  }
  return load_text(len ? std::string(source, len) : std::string(source), out);
}

arl_status arl_program_load_file(const char* path, arl_program** out) {
  if (!path) {
    set_error("path is null");
    return ARL_ERR_ARG;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    set_error(std::string("cannot open program file '") + path + "'");
    return ARL_ERR_LOAD;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return load_text(text.str(), out);
}

void arl_program_free(arl_program* prog) { delete prog; }

arl_status arl_run(const arl_program* prog, const arl_run_options* opts,
                   arl_run_stats* stats) {
  if (!prog || !prog->program) {
    set_error("program handle is null");
    return ARL_ERR_ARG;
  }
  RunOptions ro;
  if (opts) {
    ro.scheduler = opts->scheduler == ARL_SCHED_CONCURRENT
                       ? RunOptions::Scheduler::Concurrent
                       : RunOptions::Scheduler::Deterministic;
    ro.has_seed = opts->has_seed != 0;
    ro.seed = opts->seed;
    ro.max_turns = opts->max_turns;
    ro.trace_propagation = opts->trace_propagation != 0;
    ro.trace_sct = opts->trace_sct != 0;
    if (opts->out_write) {
      arl_write_fn fn = opts->out_write;
      void* ud = opts->out_userdata;
      ro.out = [fn, ud](const std::string& s) { fn(s.data(), s.size(), ud); };
    }
    if (opts->err_write) {
      arl_write_fn fn = opts->err_write;
      void* ud = opts->err_userdata;
      ro.err = [fn, ud](const std::string& s) { fn(s.data(), s.size(), ud); };
    }
  }
  try {
    Runtime runtime(*prog->program, std::move(ro));
    arl_status result = ARL_OK;
    try {
      runtime.run();
    } catch (const Error& e) {
      set_error(e.what());
      result = status_for(e);
    }
    if (stats) {
      stats->turns = runtime.stats.turns;
      stats->messages_sent = runtime.stats.messages_sent;
      stats->publications_delivered = runtime.stats.publications_delivered;
      stats->stale_publications_dropped = runtime.stats.stale_publications_dropped;
      stats->propagations = runtime.stats.propagations;
      stats->stream_emissions = runtime.stats.stream_emissions;
      stats->actors_spawned = runtime.stats.actors_spawned;
      stats->reactors_spawned = runtime.stats.reactors_spawned;
    }
    return result;
  } catch (const std::exception& e) {
    set_error(e.what());
    return ARL_ERR_RUNTIME;
  }
}

arl_status arl_dump_dag(const arl_program* prog, const char* behaviour,
                        char** out_text) {
  if (!prog || !prog->program || !behaviour || !out_text) {
    set_error("invalid argument");
    return ARL_ERR_ARG;
  }
  *out_text = nullptr;
  const Dag* dag = prog->program->find_dag(behaviour);
  if (!dag) {
    set_error(std::string("unknown reactor behaviour '") + behaviour + "'");
    return ARL_ERR_ARG;
  }
  std::string text = dump_dag(*dag);
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (!buf) {
    set_error("out of memory");
    return ARL_ERR_RUNTIME;
  }
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';
  *out_text = buf;
  return ARL_OK;
}

void arl_string_free(char* text) { std::free(text); }

const char* arl_last_error(void) { return tl_error.c_str(); }

const char* arl_version(void) { return "0.1.0"; }

} // extern "C"
