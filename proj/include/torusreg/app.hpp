#pragma once

#include <string>
#include <vector>

namespace torusreg::app {

// Parse and dispatch a command line (program name excluded). Returns the
// process exit code: 0 success, 1 usage error (bad flags, missing files),
// 2 data or fit error. Every successful run writes one JSON manifest that
// records the resolved configuration and argv needed to replay it.
int run(const std::vector<std::string>& argv);

}  // namespace torusreg::app
