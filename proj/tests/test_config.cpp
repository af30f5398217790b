#include <doctest.h>

#include <string>

#include "pim/config.hpp"

using namespace pim;

namespace {

const char* base = R"(# two exponential desks
[agents]
list = exponential(3); exponential(6)

[model]
endowment = linear(0, 0.3)
dividends = linear(0, 1)

[flow]
kind = constant
q = 0.2

[sim]
dt = 0.0078125
paths = 10
)";

ConfigError error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("no error");
    return ConfigError("");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("parse and build") {
    const auto cfg = parse_config(base);
    CHECK(cfg.M() == 2);
    CHECK(cfg.J() == 1);
    CHECK(cfg.sim.steps() == 128);
    CHECK(cfg.sim.n_paths == 10);
    CHECK(cfg.build_agents().all_exponential());
    CHECK(cfg.build_flow().is_constant());
    CHECK(cfg.build_model().endowment(2.0) == doctest::Approx(0.6));
}

TEST_CASE("echo round trip and hash") {
    const auto cfg = parse_config(base);
    const std::string e = cfg.echo();
    CHECK(parse_config(e).echo() == e);
    CHECK(parse_config(e).hash() == cfg.hash());
    CHECK(cfg.hash().size() == 16);
    CHECK(e.find("seed = 1") != std::string::npos);
    auto other = cfg;
    other.sim.seed = 2;
    CHECK(other.hash() != cfg.hash());
}

TEST_CASE("bad step names the key and the line") {
    std::string text = base;
    text.replace(text.find("dt = 0.0078125"), 14, "dt = 0.3");
    const auto err = error_of(text);
    CHECK(err.key() == "sim.dt");
    CHECK(err.line() == 14);
    CHECK(std::string(err.what()).find("sim.dt") != std::string::npos);
}

TEST_CASE("misspelled section gets a suggestion") {
    const auto err = error_of("[modell]\nendowment = linear(0, 1)\n");
    CHECK(err.line() == 1);
    CHECK(std::string(err.what()).find("did you mean 'model'") != std::string::npos);
    const auto key = error_of("[sim]\nseeed = 3\n");
    CHECK(std::string(key.what()).find("did you mean 'seed'") != std::string::npos);
}

TEST_CASE("duplicates and malformed values") {
    CHECK(error_of(std::string(base) + "paths = 11\n").line() == 16);
    CHECK(error_of("[sim]\npaths = many\n").key() == "sim.paths");
    CHECK(error_of("[agents]\nlist = exponential(-1)\n").key() == "agents.list");
    CHECK(error_of("[sim]\ncoordinates = polar\n").key() == "sim.coordinates");
}

TEST_CASE("tables and schedules") {
    const auto cfg = parse_config(R"([agents]
list = tanh(2, 0.5)
[model]
dividends = table(-1:0; 0:0; 1:1)
[flow]
kind = piecewise
schedule = 0: 1; 0.5: -1
)");
    CHECK(cfg.dividends[0].table.size() == 3);
    const auto flow = cfg.build_flow();
    const Vec U = Vec::Constant(1, -1.0);
    CHECK(flow.at(0.7, U, 0.0)(0) == -1.0);
    CHECK(parse_config(cfg.echo()).echo() == cfg.echo());
}

TEST_CASE("number formatting reads back") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.0, -2.5})
        CHECK(std::stod(format_number(x)) == x);
}

}
