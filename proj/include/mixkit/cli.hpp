#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixkit {

// Exit codes: 0 ok, 1 flag/parse error, 2 I/O, 3 contract violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixkit
