// Command-line driver: check / fields / simulate / oracle.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pim/conditions.hpp"
#include "pim/config.hpp"
#include "pim/fields.hpp"
#include "pim/report.hpp"
#include "pim/sde.hpp"

namespace fs = std::filesystem;
using namespace pim;

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<double> dt;
    std::optional<std::size_t> quadrature;
    std::optional<double> eps;
    std::optional<std::string> theorem;
};

ExperimentConfig load(const Overrides& o) {
    ExperimentConfig cfg = load_config(o.config);
    if (o.out) cfg.out_dir = *o.out;
    if (o.seed) cfg.sim.seed = *o.seed;
    if (o.paths) cfg.sim.n_paths = *o.paths;
    if (o.dt) cfg.sim.dt = *o.dt;
    if (o.quadrature) cfg.sim.quadrature_n = *o.quadrature;
    if (o.eps) cfg.sim.explosion_eps = *o.eps;
    if (o.theorem) cfg.theorem = *o.theorem;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
}

void header(std::ostream& os, const ExperimentConfig& cfg) { os << "# config_hash=" << cfg.hash() << '\n'; }

FieldEngine make_engine(const ExperimentConfig& cfg, const AgentSet& agents, const MarketModel& model) {
    FieldEngine engine(agents, model, cfg.sim.quadrature_n);
    engine.set_newton_tolerance(cfg.sim.newton_tol);
    return engine;
}

int run_check(const ExperimentConfig& cfg) {
    const AgentSet agents = cfg.build_agents();
    const MarketModel model = cfg.build_model();
    ConditionOptions opt;
    opt.p_list = cfg.p_list;
    std::vector<int> which;
    if (cfg.theorem == "all")
        which = {1, 2, 3};
    else
        which = {std::stoi(cfg.theorem)};

    std::ostringstream text;
    header(text, cfg);
    bool any_pass = false;
    bool all_fail = true;
    for (int w : which) {
        const ConditionReport rep = check_theorem(agents, model, w, opt);
        write_condition_report(text, rep);
        any_pass = any_pass || rep.verdict == Verdict::pass;
        all_fail = all_fail && rep.verdict == Verdict::fail;
    }
    const Verdict overall = any_pass ? Verdict::pass : all_fail ? Verdict::fail : Verdict::inconclusive;
    text << "overall: " << to_string(overall) << '\n';

    if (cfg.functionals) {
        const FieldEngine engine = make_engine(cfg, agents, model);
        const OrderFlow flow = cfg.build_flow();
        const double b = cfg.b > 0.0 ? cfg.b : flow.bound() + agents.c();
        const Vec q0 = flow.at(0.0, Vec::Constant(static_cast<Eigen::Index>(cfg.M()), -1.0), 0.0);
        std::vector<std::pair<Vec, Vec>> uq;
        for (double s : {1.0, 0.5, 0.1, 0.01, 0.001}) uq.emplace_back(Vec::Constant(static_cast<Eigen::Index>(cfg.M()), -b * s), q0);
        std::vector<FieldArgs> primal;
        for (double x : cfg.field_x) primal.push_back({cfg.initial_weights(), x, q0});
        std::vector<double> times;
        for (double t : cfg.field_t)
            if (t < 1.0) times.push_back(t);
        const FunctionalLattice lat = functional_lattice(engine, times, 0.0, uq, primal, b);
        text << "functionals (b = " << fmt(b, 6) << ")\n";
        write_functionals(text, lat, cfg.precision);
    }

    std::cout << text.str();
    auto os = open_out(fs::path(cfg.out_dir) / "check.txt");
    os << text.str();
    return overall == Verdict::fail ? 1 : 0;
}

int run_fields(const ExperimentConfig& cfg) {
    const AgentSet agents = cfg.build_agents();
    const MarketModel model = cfg.build_model();
    const FieldEngine engine = make_engine(cfg, agents, model);
    const OrderFlow flow = cfg.build_flow();
    const Vec v = cfg.initial_weights();
    const Vec q = flow.at(0.0, Vec::Constant(static_cast<Eigen::Index>(cfg.M()), -1.0), 0.0);
    std::vector<FieldRow> rows;
    for (double t : cfg.field_t)
        for (double z : cfg.field_z)
            for (double x : cfg.field_x) {
                FieldRow row;
                row.field = engine.evaluate(t, z, FieldArgs{v, x, q}, 1, 1);
                try {
                    const FieldArgs warm{v / row.field.F_x, x, q};
                    row.K = engine.eval_K(t, z, row.field.F_v, q, warm).K;
                } catch (const Error&) {
                    row.K = Vec::Constant(v.size(), std::numeric_limits<double>::quiet_NaN());
                }
                rows.push_back(std::move(row));
            }
    auto os = open_out(fs::path(cfg.out_dir) / "fields.csv");
    header(os, cfg);
    write_fields_csv(os, rows, cfg.M(), cfg.J(), cfg.precision);
    std::cout << "wrote " << rows.size() << " rows to " << (fs::path(cfg.out_dir) / "fields.csv").string() << '\n';
    return 0;
}

struct Simulation {
    InitialState init;
    EnsembleResult result;
};

Simulation simulate(const ExperimentConfig& cfg, const FieldEngine& engine, const OrderFlow& flow) {
    Simulation s;
    const Vec q0 = flow.at(0.0, Vec::Constant(static_cast<Eigen::Index>(cfg.M()), -1.0), 0.0);
    s.init = initial_state(engine, cfg.initial_weights(), cfg.x0, q0);
    s.result = run_ensemble(engine, flow, cfg.sim, s.init.U0, true);
    return s;
}

int run_simulate(const ExperimentConfig& cfg) {
    const AgentSet agents = cfg.build_agents();
    const MarketModel model = cfg.build_model();
    const FieldEngine engine = make_engine(cfg, agents, model);
    const OrderFlow flow = cfg.build_flow();
    const Simulation sim = simulate(cfg, engine, flow);
    const fs::path dir(cfg.out_dir);
    {
        auto os = open_out(dir / "config.txt");
        header(os, cfg);
        os << cfg.echo();
    }
    if (cfg.write_paths) {
        for (const auto& p : sim.result.paths) {
            char name[32];
            std::snprintf(name, sizeof name, "path_%05zu.csv", p.index);
            auto os = open_out(dir / "paths" / name);
            header(os, cfg);
            write_path_csv(os, p, cfg.precision);
        }
    }
    std::ostringstream text;
    header(text, cfg);
    write_summary(text, sim.result.summary, cfg.precision);
    auto os = open_out(dir / "summary.txt");
    os << text.str();
    std::cout << text.str();
    return 0;
}

int run_oracle(const ExperimentConfig& cfg) {
    const AgentSet agents = cfg.build_agents();
    const MarketModel model = cfg.build_model();
    const FieldEngine engine = make_engine(cfg, agents, model);
    const OrderFlow flow = cfg.build_flow();
    if (!flow.is_constant()) {
        std::cerr << "error: the oracle needs a constant flow\n";
        return 2;
    }
    const Simulation sim = simulate(cfg, engine, flow);
    const auto kappa = gbm_rate(engine, flow);
    const std::size_t N = cfg.sim.steps();
    const auto M = static_cast<Eigen::Index>(cfg.M());

    std::vector<std::size_t> checkpoints;
    for (std::size_t k = 1; k <= 4; ++k)
        if ((N * k) % 4 == 0) checkpoints.push_back(N * k / 4);

    std::ostringstream table;
    header(table, cfg);
    table << "t,paths";
    for (Eigen::Index m = 1; m <= M; ++m) table << ",mean_abs_err" << m;
    table << '\n';
    double worst = 0.0;
    for (std::size_t n : checkpoints) {
        Vec err = Vec::Zero(M);
        std::size_t count = 0;
        for (const auto& p : sim.result.paths) {
            if (p.stopped || p.t.size() <= n) continue;
            const double t = p.t[n];
            Vec exact;
            if (kappa)
                exact = sim.init.U0 * std::exp(-*kappa * p.B[n] - 0.5 * *kappa * *kappa * t);
            else
                exact = engine.eval_F(t, p.B[n], sim.init.args, 1).F_v;
            err += (p.U[n] - exact).cwiseAbs();
            ++count;
        }
        if (count) err /= static_cast<double>(count);
        worst = std::max(worst, err.size() ? err.maxCoeff() : 0.0);
        table << fmt(static_cast<double>(n) / static_cast<double>(N), cfg.precision) << ',' << count;
        for (Eigen::Index m = 0; m < M; ++m) table << ',' << fmt(err(m), cfg.precision);
        table << '\n';
    }
    auto os = open_out(fs::path(cfg.out_dir) / "oracle.csv");
    os << table.str();
    std::cout << table.str();
    std::cout << "oracle = " << (kappa ? "geometric Brownian closed form" : "F_v along the path") << '\n';
    std::cout << "max_mean_abs_err = " << fmt(worst, cfg.precision) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Price-impact utility SDE toolkit"};
    app.require_subcommand(1);
    Overrides o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--paths", o.paths, "number of paths");
        sub->add_option("--dt", o.dt, "time step");
        sub->add_option("--quadrature", o.quadrature, "Gauss-Hermite nodes");
        sub->add_option("--eps", o.eps, "explosion threshold");
    };
    auto* check = app.add_subcommand("check", "check theorem hypotheses");
    add_common(check);
    check->add_option("--theorem", o.theorem, "all, 1, 2 or 3");
    auto* fields = app.add_subcommand("fields", "tabulate F, H and K");
    add_common(fields);
    auto* simulate_cmd = app.add_subcommand("simulate", "simulate utility paths");
    add_common(simulate_cmd);
    auto* oracle = app.add_subcommand("oracle", "compare simulation with a closed-form or quadrature oracle");
    add_common(oracle);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const ExperimentConfig cfg = load(o);
        if (check->parsed()) return run_check(cfg);
        if (fields->parsed()) return run_fields(cfg);
        if (simulate_cmd->parsed()) return run_simulate(cfg);
        if (oracle->parsed()) return run_oracle(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
