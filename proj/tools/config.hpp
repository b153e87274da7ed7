#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lvbcli {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error("ConfigError: " + msg) {}
};

struct ModelSpec {
    std::string type = "gbm";  // gbm | cev
    double sigma = 0.0;        // gbm
    double sigma0 = 0.0;       // cev
    double rho = 0.0;          // cev
    double rate = 0.0;
    double dividend = 0.0;
};

struct BarrierSpec {
    std::string type = "constant";  // constant | exponential
    double level = 0.0;
    double growth = 0.0;  // exponential only
};

struct PayoffSpec {
    std::string type = "double_no_touch";  // call | put | double_no_touch | smooth_bump
    double strike = 0.0;
    double left = 0.0;
    double right = 0.0;
    double height = 1.0;
};

struct ContractSpec {
    std::optional<BarrierSpec> lower;
    std::optional<BarrierSpec> upper;
    PayoffSpec payoff;
    double maturity = 1.0;
};

struct McSpec {
    std::uint64_t paths = 100000;
    int steps = 100;
    std::uint64_t seed = 42;
    bool bridge_correction = true;
};

struct OracleSpec {
    std::optional<McSpec> mc;
    bool closed_form = true;
};

struct RunSpec {
    int n = 256;
    std::vector<double> spots;
    std::string method = "auto";  // volterra | laplace | auto
    std::vector<int> n_list;      // convergence study; empty means the default list
    std::optional<int> smoothing; // replace the payoff by its C^2 approximant of this level
    OracleSpec oracles;
};

struct RunConfig {
    int schema_version = 1;
    ModelSpec model;
    ContractSpec contract;
    RunSpec run;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical form: fixed field order, defaults written out, two-space indent, trailing newline.
std::string serialize_config(const RunConfig& cfg);

} // namespace lvbcli
