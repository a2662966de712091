#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace transduct {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitConfigError = 3;

/// Resolved command-line configuration: defaults, then the config file, then flags.
struct CliConfig {
    double gamma = 0.8;
    std::size_t phi = 10;
    std::size_t categories = 3;
    bool categories_set = false;  // explicitly given by file or flag
    std::string policy = "itsvm";
    bool policy_set = false;
    bool agreement = true;
    std::uint64_t seed = 0;
    std::vector<std::string> train;
    std::vector<std::string> test;
    std::vector<double> gammas{0.7, 0.8, 0.9};
    std::vector<std::string> combos;
    std::optional<std::string> out;
    std::string format = "csv";
    std::size_t jobs = 1;
};

/// Parses a flat key=value file; '#' starts a comment line.
std::map<std::string, std::string> parse_config_file(const std::string& text);

/// Entry point behind the `transduct` binary. argv[0] is the program name.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace transduct
