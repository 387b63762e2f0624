// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>

#include "mpsm/experiment.hpp"
#include "mpsm/verify.hpp"

int main(int argc, char** argv) {
  mpsm::VerifyOptions o;
  if (argc > 1) o.seed = std::strtoull(argv[1], nullptr, 10);
  mpsm::set_thread_count(mpsm::threads_from_env());
  const mpsm::VerifyReport rep = mpsm::run_suite("acceptance", o, [](const mpsm::CriterionReport& r) {
    std::cout << mpsm::summary_line(r) << std::endl;
    if (!r.note.empty()) std::cout << "      " << r.note << std::endl;
  });
  int failed = 0;
  for (const auto& c : rep.criteria) failed += c.passed() ? 0 : 1;
  std::cout << (rep.criteria.size() - failed) << "/" << rep.criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
