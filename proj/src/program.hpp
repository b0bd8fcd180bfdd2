#pragma once

#include <memory>
#include <string_view>
#include <unordered_map>

#include "ast.hpp"
#include "dag.hpp"

namespace arlang {

// A loaded program: parsed definitions, purity-checked, with every reactor
// behaviour compiled to its dependency graph. Immutable after load; the
// address of a Program (and of the definitions inside it) stays stable for
// the lifetime of every value created from it.
class Program {
public:
  ProgramDef defs;
  std::unordered_map<std::string, Dag> dags;
  ClassDef random_class;

  const Dag* find_dag(const std::string& name) const {
    auto it = dags.find(name);
    return it == dags.end() ? nullptr : &it->second;
  }

  // tokenize + parse + purity check + compile all reactor behaviours.
  // Throws Error; everything thrown here is a load error.
  static std::unique_ptr<Program> load(std::string_view source);

private:
  Program() = default;
};

} // namespace arlang
