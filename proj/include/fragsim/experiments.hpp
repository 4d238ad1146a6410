#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace fragsim {

// Invalid or unknown configuration content; maps to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed; // overrides the config seed
    bool full = false;                 // restore paper-scale ensemble sizes
    int threads = 1;
    bool svg = false;
};

// Parses the config, dispatches on its "experiment" field and writes the
// result files into out_dir. Throws ConfigError for bad configs and
// NumericalError for solver failures. When expected_experiment is non-empty
// the config must declare that experiment.
void run_experiment_file(const std::string& config_path, const RunOptions& options,
                         const std::string& expected_experiment = "");

// Parse + reserialize, for round-trip checks and preset generation.
std::string canonical_config(const std::string& text);

} // namespace fragsim
