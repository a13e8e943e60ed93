#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "arise/error.hpp"
#include "arise/exec/validate.hpp"
#include "arise/protocol/protocol.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Executor protocol server backed by the builtin executor (stdin/stdout)"};
  std::string maps_dir = std::string(ARISE_DATA_DIR) + "/maps";
  app.add_option("--maps", maps_dir, "Directory of road network JSON files");
  CLI11_PARSE(app, argc, argv);
  try {
    auto maps = std::make_shared<const arise::exec::MapSet>(arise::exec::MapSet::load_dir(maps_dir));
    std::ios::sync_with_stdio(false);
    arise::protocol::Server server(maps);
    server.serve(std::cin, std::cout);
  } catch (const arise::Error& e) {
    std::cerr << "arise-exec-server: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
