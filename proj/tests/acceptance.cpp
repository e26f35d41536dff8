// One line per acceptance criterion. Tolerances are pinned inside each check
// and reported alongside the measured values.

#include <cstdio>
#include <exception>
#include <string>

#include "hdw/verify.hpp"

namespace {

std::string describe(const hdw::VerificationReport& r) {
  std::string s;
  char buf[160];
  for (const auto& m : r.measurements) {
    if (m.kind == "flag") {
      std::snprintf(buf, sizeof buf, "%s=%s", m.name.c_str(), m.passed ? "yes" : "no");
    } else if (m.kind == "band") {
      std::snprintf(buf, sizeof buf, "%s=%.4g (target %.4g +/- %.0f%%)", m.name.c_str(),
                    m.value, m.target, 100 * m.tolerance);
    } else {
      std::snprintf(buf, sizeof buf, "%s=%.3e (%s %.1e)", m.name.c_str(), m.value,
                    m.kind == "min" ? ">=" : "<=", m.tolerance);
    }
    if (!s.empty()) s += "; ";
    s += buf;
  }
  return s;
}

}  // namespace

int main() {
  hdw::VerifyOptions opts;
  int failures = 0;
  int k = 0;
  for (const auto& name : hdw::suite_names()) {
    ++k;
    try {
      auto r = hdw::run_suite(name, opts);
      std::printf("%s [%d] %s: %s\n", r.passed ? "PASS" : "FAIL", k, name.c_str(),
                  describe(r).c_str());
      if (!r.passed) ++failures;
    } catch (const std::exception& e) {
      std::printf("FAIL [%d] %s: exception: %s\n", k, name.c_str(), e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", k - failures, k);
  return failures == 0 ? 0 : 1;
}
