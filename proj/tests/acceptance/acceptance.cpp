#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "bcnls/checks.hpp"
#include "bcnls/diagnostics.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> names(argv + 1, argv + argc);
  if (names.empty()) names = bcnls::preset_names();
  bcnls::set_warning_handler([](const std::string&) {});

  int failed = 0;
  for (const auto& name : names) {
    bcnls::CheckResult r;
    try {
      r = bcnls::run_preset(name);
    } catch (const std::exception& e) {
      r.id = name;
      r.pass = false;
      r.summary = std::string("error: ") + e.what();
    }
    failed += r.pass ? 0 : 1;
    std::printf("%-12s %s  %s: %s (%.1fs)\n", r.id.c_str(), r.pass ? "PASS" : "FAIL", r.title.c_str(),
                r.summary.c_str(), r.seconds);
    for (const auto& f : r.findings) std::printf("%-12s       finding: %s\n", "", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(names.size()) - failed, names.size());
  return failed == 0 ? 0 : 1;
}
