#include <cstdio>

#include "acceptance.hpp"
#include "qmp/commands.hpp"

int main() {
  qmp::acceptance::Config cfg;
  cfg.seed = qmp::default_seed();
  const auto results = qmp::acceptance::run_all(cfg);
  std::fputs(qmp::acceptance::format_table(results).c_str(), stdout);
  for (const auto& r : results)
    if (!r.pass) return 1;
  return 0;
}
