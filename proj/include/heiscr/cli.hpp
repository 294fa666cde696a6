#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "heiscr/hgroup.hpp"

namespace heiscr {

/// "x_1,...,x_n,y_1,...,y_n,t" -> HPoint. Throws ParseError naming the token
/// position on wrong arity or a non-numeric token.
HPoint parse_point(std::string_view s, int n);

/// Shortest round-trip decimal form accepted by parse_point.
std::string format_point(const HPoint& a);

/// Runs the command line. Exit codes: 0 success, 1 a check failed, 2 usage,
/// configuration or input errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace heiscr
