#pragma once

// Numerical checks of the reproduced results, shared by the acceptance test
// and the `verify` command.

#include <string>
#include <vector>

namespace nlsp::verify {

struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

enum class Suite { ptrig, hfun, variational, critical, all };

Suite parse_suite(const std::string& name);

struct Options {
  bool fast = false;  // coarser meshes and grids
  int threads = 1;
};

/// Runs the criteria belonging to `suite`, in criterion order.
std::vector<Criterion> run(Suite suite, const Options& opts = {});

}  // namespace nlsp::verify
