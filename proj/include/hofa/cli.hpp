#ifndef HOFA_CLI_HPP
#define HOFA_CLI_HPP

namespace hofa {

// Parses argv, runs one subcommand, and prints a single JSON report on
// standard output. Reports are byte-stable: keys sorted, reals fixed to
// twelve decimals, timing included only under --timing. Exit codes: 0 for
// success or accept, 1 for reject, 2 for inconclusive, 3 for usage, parse,
// or budget failures.
int run_cli(int argc, const char* const* argv);

}  // namespace hofa

#endif
