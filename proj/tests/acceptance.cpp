#include <CLI11.hpp>
#include <iostream>

#include "fsflow/verification.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria 1-11"};
  fsflow::VerifyOptions opts;
  app.add_option("--presets", opts.preset_dir, "Preset directory")->required();
  app.add_option("--work-dir", opts.work_dir, "Scratch directory for preset artifacts")->capture_default_str();
  app.add_option("--only", opts.only, "Criterion ids to run");
  app.add_option("--seed", opts.seed, "Seed for randomized checks")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  fsflow::run_acceptance(opts, [&](const fsflow::CriterionResult& r) {
    if (!r.pass) ++failed;
    std::cout << fsflow::format_result(r) << std::endl;
  });
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
