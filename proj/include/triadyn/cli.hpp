#ifndef TRIADYN_CLI_HPP
#define TRIADYN_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace triadyn {

// Entry point behind the triadyn binary. Returns the process exit code:
// 0 on success, 1 on numerical failure, 2 on validation or usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace triadyn

#endif
