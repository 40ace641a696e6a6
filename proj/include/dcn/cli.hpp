#pragma once

// dcn run <file.dcn | builtin[:param]>   trace summary on stdout, SVG series with --out
// dcn check-sep [source] --amps/--ket    separability report; exit 0 separable, 3 entangled, 4 marginal
// dcn serve --port <p>                   session service
//
// Exit 1: parse or usage error. Exit 2: runtime error (zero-probability forced outcome, bind failure).

#include <ostream>

namespace dcn {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int parse = 1;
inline constexpr int runtime = 2;
inline constexpr int entangled = 3;
inline constexpr int marginal = 4;
}  // namespace exit_code

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcn
