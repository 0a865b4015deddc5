#ifndef MCD_TOOLS_COMMANDS_H_
#define MCD_TOOLS_COMMANDS_H_

namespace mcd::cli {

// Exit status: 0 success, 1 domain or I/O error, 2 usage error.
int run(int argc, char** argv);

}  // namespace mcd::cli

#endif  // MCD_TOOLS_COMMANDS_H_
