#pragma once

#include <string>
#include <vector>

namespace wqg {

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Module names accepted by verify_module, in dependency order.
const std::vector<std::string>& verify_modules();

// Quick property checks for one module; throws ConfigError for an unknown name.
std::vector<CheckResult> verify_module(const std::string& module);

}  // namespace wqg
