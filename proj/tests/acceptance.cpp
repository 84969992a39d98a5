// Desk-scale acceptance run: one line per criterion, exit status 1 if any fails.
#include <cstdlib>
#include <iostream>

#include "regx/errors.hpp"
#include "regx/repro.hpp"

using namespace regx;

int main(int argc, char** argv) {
  repro::DeskScale desk;
  if (argc > 1) desk.seed = std::strtoull(argv[1], nullptr, 10);
  auto progress = [](const std::string& m) { std::cerr << "[acceptance] " << m << "\n"; };

  int failed = 0;
  auto report = [&](const repro::CriterionResult& r) {
    std::cout << repro::format_result(r) << std::endl;
    failed += r.passed ? 0 : 1;
  };
  try {
    desk.validate();
    report(repro::check_exact_values());
    report(repro::check_triangle_oracles(desk.seed));
    report(repro::check_gradients(desk.seed));
    report(repro::check_mixup_invariants(desk.seed));
    const auto first = repro::run_pipeline(desk, progress);
    for (const auto& c : first.criteria) report(c);
    progress("second run for the determinism check");
    const auto second = repro::run_pipeline(desk, progress);
    report(repro::check_determinism(first, second));
  } catch (const std::exception& e) {
    std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
    return 2;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
