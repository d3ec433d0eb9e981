#ifndef PROTOMINE_CLI_HPP_
#define PROTOMINE_CLI_HPP_

#include "protomine/types.hpp"

#include <filesystem>
#include <iosfwd>

namespace protomine {

// Flat key = value config file mirroring MiningConfig field names. Unknown
// keys are errors; '#' starts a comment.
MiningConfig read_config_file(const std::filesystem::path& path);
std::string config_to_string(const MiningConfig& cfg);

// Full command-line front end, callable in-process. args excludes the
// program name. Returns 0 on success, 1 on validation/I-O errors, 2 on
// internal invariant violations.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace protomine

#endif  // PROTOMINE_CLI_HPP_
