#pragma once

#include "entroball/config.hpp"

namespace entroball {

// Exit codes: 0 success, 1 input error (thrown as exceptions by these
// functions and mapped by the CLI), 2 solver non-convergence.

int cmd_transport(const RunConfig& cfg);
int cmd_mincross(const RunConfig& cfg);
int cmd_sweep(const RunConfig& cfg, bool parallel_rows = false);

} // namespace entroball
