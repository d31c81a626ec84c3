// One line per acceptance criterion; exit status is nonzero when any line fails.
#include <iostream>

#include <smcaero/checks.hpp>

using namespace smcaero;

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  int failed = 0;
  auto report = [&failed](const CheckResult& c) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << std::endl;
    if (!c.pass) ++failed;
  };
  report(check_sigma_design());
  report(check_prd_bench());
  report(check_prd_corpus());
  report(check_differentiator());
  report(check_stw_convergence());
  const auto rpl = run_rpl_suite(1);
  report(check_rpl(rpl));
  report(check_lv(run_lv_suite()));
  report(check_properties(rpl));
  std::cout << strf("%d failed, %.1f s", failed, seconds_since(t0)) << std::endl;
  return failed == 0 ? 0 : 1;
}
