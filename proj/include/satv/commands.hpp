// Execution of manifests: the behavior behind each CLI subcommand.
#ifndef SATV_COMMANDS_HPP_
#define SATV_COMMANDS_HPP_

#include <functional>
#include <iosfwd>

#include "satv/manifest.hpp"

namespace satv {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitSolver = 4;

/// Runs the command named in m.command. Errors propagate as IoError,
/// std::invalid_argument or SolverAbort.
void execute(const RunManifest& m, std::ostream& out);

/// Calls body and maps its exceptions to exit codes, printing a one-line
/// reason to err.
int guarded(const std::function<void()>& body, std::ostream& err);

}  // namespace satv

#endif  // SATV_COMMANDS_HPP_
