// Writes a synthetic bios file usable as `membias synth --bios` input.
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "membias/demo_bios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate template biographies for offline membias runs"};
  std::string out = "demo_bios.jsonl";
  membias::DemoBioOptions options;
  app.add_option("--out", out, "Output JSON Lines file")->capture_default_str();
  app.add_option("--count", options.count, "Number of bios")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", options.seed, "Generator seed")->capture_default_str();
  app.add_option("--test-fraction", options.test_fraction, "Share of bios in the test split")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_flag("--balanced", options.balanced_professions, "Draw every profession 50/50 male/female");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    membias::write_demo_bios(out, options);
    std::cout << "wrote " << options.count << " bios to " << out << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
