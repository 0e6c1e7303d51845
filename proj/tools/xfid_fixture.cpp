#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "xfid/error.hpp"
#include "xfid/fixture.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic bilingual fixture corpus"};
  std::string dir;
  xfid::FixtureOptions options;
  app.add_option("dir", dir, "output directory")->required();
  app.add_option("--seed", options.seed, "generator seed")->capture_default_str();
  app.add_option("--prompt-dir", options.prompt_dir, "prompt_dir written into xfid.toml")->capture_default_str();
  app.add_option("--endpoint", options.provider_endpoint, "provider endpoint written into xfid.toml");
  CLI11_PARSE(app, argc, argv);
  try {
    xfid::write_synthetic_fixture(dir, options);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "xfid-fixture: %s\n", e.what());
    return 1;
  }
  return 0;
}
