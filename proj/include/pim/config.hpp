#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pim/errors.hpp"
#include "pim/market.hpp"
#include "pim/sde.hpp"
#include "pim/utility.hpp"

namespace pim {

/// Parse or validation failure; line is 0 when the problem is not tied to one line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0, std::string key = {});
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

/// name(arg, arg, ...) or, for tables, table(k:v; k:v; ...).
struct CallDecl {
    std::string name;
    std::vector<double> args;
    std::vector<std::pair<double, double>> table;
    std::string text() const;
    bool operator==(const CallDecl&) const = default;
};

struct ExperimentConfig {
    // [agents]
    std::vector<CallDecl> agents;
    double c = 0;  ///< 0 selects the bound implied by the families
    int order = 6;
    // [model]
    CallDecl endowment{"linear", {0.0, 0.0}, {}};
    std::vector<CallDecl> dividends;
    // [flow]
    std::string flow_kind = "constant";
    std::vector<double> q;
    std::vector<std::pair<double, std::vector<double>>> schedule;
    double t_on = 0.5;
    std::vector<double> q_after;
    double gain_B = 0;
    double gain_logU = 0;
    double bound = 0;
    // [init]
    std::vector<double> v0;
    double x0 = 0;
    // [sim]
    SimulationConfig sim;
    // [output]
    std::string out_dir = "out";
    int precision = 12;
    bool write_paths = true;
    // [fields]
    std::vector<double> field_t = {0.0, 0.5};
    std::vector<double> field_z = {-1.0, 0.0, 1.0};
    std::vector<double> field_x = {0.0};
    // [check]
    std::string theorem = "all";
    std::vector<double> p_list = {0.5, 1.0, 2.0, 4.0};
    bool functionals = false;
    double b = 0;  ///< 0 selects flow bound + c

    std::size_t M() const { return agents.size(); }
    std::size_t J() const { return dividends.size(); }

    AgentSet build_agents() const;
    MarketModel build_model() const;
    OrderFlow build_flow() const;
    Vec initial_weights() const;

    /// Checks every semantic constraint; throws ConfigError naming the key.
    void validate() const;

    /// Effective configuration with every default spelled out; parses back to the same config.
    std::string echo() const;
    /// FNV-1a hash of echo(), 16 hex digits.
    std::string hash() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Shortest decimal that reads back to the same double.
std::string format_number(double x);

}  // namespace pim
