#include "program.hpp"

#include "parser.hpp"

namespace arlang {

std::unique_ptr<Program> Program::load(std::string_view source) {
  auto prog = std::unique_ptr<Program>(new Program());
  prog->defs = parse_source(source);
  check_program_purity(prog->defs);
  prog->random_class.name = "Random";
  prog->random_class.builtin = true;
  compile_all_reactors(*prog);
  return prog;
}

} // namespace arlang
