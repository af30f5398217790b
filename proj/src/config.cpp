#include "pim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace pim {

ConfigError::ConfigError(const std::string& msg, int line, std::string key)
    : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line), key_(std::move(key)) {}

std::string format_number(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string CallDecl::text() const {
    std::string s = name + "(";
    if (name == "table") {
        for (std::size_t i = 0; i < table.size(); ++i)
            s += (i ? "; " : "") + format_number(table[i].first) + ":" + format_number(table[i].second);
    } else {
        for (std::size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + format_number(args[i]);
    }
    return s + ")";
}

namespace {

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"agents", {"list", "c", "order"}},
        {"model", {"endowment", "dividends"}},
        {"flow", {"kind", "q", "schedule", "t_on", "q_after", "gain_B", "gain_logU", "bound"}},
        {"init", {"v0", "x0"}},
        {"sim", {"dt", "paths", "seed", "eps", "quadrature", "newton_tol", "coordinates", "noise_steps"}},
        {"output", {"dir", "precision", "write_paths"}},
        {"fields", {"t", "z", "x"}},
        {"check", {"theorem", "p", "functionals", "b"}},
    };
    return s;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

std::string suggestion(const std::string& word, const std::vector<std::string>& options) {
    std::string best;
    std::size_t best_d = 3;
    for (const auto& o : options) {
        const std::size_t d = edit_distance(word, o);
        if (d < best_d) {
            best_d = d;
            best = o;
        }
    }
    return best.empty() ? std::string() : " (did you mean '" + best + "'?)";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Splits on sep at parenthesis depth 0; empty input gives no items.
std::vector<std::string> split_top(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> e) : entries_(std::move(e)) {}

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    int line(const std::string& key) const {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError("'" + key + "': " + what, line(key), key);
    }

    double number(const std::string& key, const std::string& text) const {
        const std::string t = trim(text);
        double v = 0;
        const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(key, "expected a number, got '" + t + "'");
        return v;
    }

    void get(const std::string& key, double& out) const {
        if (has(key)) out = number(key, entries_.at(key).value);
    }
    void get(const std::string& key, int& out) const {
        if (!has(key)) return;
        const double v = number(key, entries_.at(key).value);
        if (v != std::floor(v) || std::abs(v) > 1e9) fail(key, "expected an integer");
        out = static_cast<int>(v);
    }
    void get(const std::string& key, std::size_t& out) const {
        if (!has(key)) return;
        const double v = number(key, entries_.at(key).value);
        if (v != std::floor(v) || v < 0 || v > 1e15) fail(key, "expected a non-negative integer");
        out = static_cast<std::size_t>(v);
    }
    void get(const std::string& key, std::uint64_t& out, int) const {
        if (!has(key)) return;
        const std::string t = trim(entries_.at(key).value);
        const auto r = std::from_chars(t.data(), t.data() + t.size(), out);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) fail(key, "expected an unsigned integer");
    }
    void get(const std::string& key, std::string& out) const {
        if (has(key)) out = trim(entries_.at(key).value);
    }
    void get(const std::string& key, bool& out) const {
        if (!has(key)) return;
        const std::string t = trim(entries_.at(key).value);
        if (t == "true")
            out = true;
        else if (t == "false")
            out = false;
        else
            fail(key, "expected true or false");
    }
    void get(const std::string& key, std::vector<double>& out) const {
        if (!has(key)) return;
        out.clear();
        for (const auto& item : split_top(entries_.at(key).value, ',')) out.push_back(number(key, item));
    }

    CallDecl call(const std::string& key, const std::string& text) const {
        const std::string t = trim(text);
        const auto open = t.find('(');
        if (open == std::string::npos || t.back() != ')') fail(key, "expected name(args), got '" + t + "'");
        CallDecl d;
        d.name = trim(t.substr(0, open));
        const std::string inner = t.substr(open + 1, t.size() - open - 2);
        if (d.name == "table") {
            for (const auto& item : split_top(inner, ';')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos) fail(key, "table entries are knot:value");
                d.table.emplace_back(number(key, item.substr(0, colon)), number(key, item.substr(colon + 1)));
            }
        } else {
            for (const auto& item : split_top(inner, ',')) d.args.push_back(number(key, item));
        }
        return d;
    }
    void get(const std::string& key, CallDecl& out) const {
        if (has(key)) out = call(key, entries_.at(key).value);
    }
    void get(const std::string& key, std::vector<CallDecl>& out) const {
        if (!has(key)) return;
        out.clear();
        for (const auto& item : split_top(entries_.at(key).value, ';')) out.push_back(call(key, item));
    }
    void get_schedule(const std::string& key, std::vector<std::pair<double, std::vector<double>>>& out) const {
        if (!has(key)) return;
        out.clear();
        for (const auto& item : split_top(entries_.at(key).value, ';')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) fail(key, "schedule entries are t: q1, q2, ...");
            std::vector<double> q;
            for (const auto& x : split_top(item.substr(colon + 1), ',')) q.push_back(number(key, x));
            out.emplace_back(number(key, item.substr(0, colon)), std::move(q));
        }
    }

private:
    std::map<std::string, Entry> entries_;
};

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

// Declared range [lo, hi] of a risk-aversion family.
std::pair<double, double> family_range(const CallDecl& d) {
    if (d.name == "exponential" || d.name == "constant") return {d.args.at(0), d.args.at(0)};
    const double base = d.args.at(0);
    const double amp = std::abs(d.args.at(1));
    return {base - amp, base + amp};
}

UtilitySpec build_agent(const CallDecl& d, double c, int order) {
    if (d.name == "exponential") {
        if (d.args.size() != 1) throw InvalidArgument("exponential takes one coefficient");
        return UtilitySpec::exponential(d.args[0], c);
    }
    return UtilitySpec::from_risk_aversion(RiskAversionFn::from_name(d.name, d.args), c, order);
}

PayoffSpec build_payoff(const CallDecl& d) {
    if (d.name == "linear") {
        if (d.args.size() != 2) throw InvalidArgument("linear takes (alpha, beta)");
        return PayoffSpec::linear(d.args[0], d.args[1]);
    }
    if (d.name == "table") {
        std::vector<double> k, v;
        for (const auto& [a, b] : d.table) {
            k.push_back(a);
            v.push_back(b);
        }
        return PayoffSpec::table(k, v);
    }
    return PayoffSpec::named(d.name, d.args);
}

double implied_c(const ExperimentConfig& cfg) {
    double c = 1.0;
    for (const auto& d : cfg.agents) {
        if (d.args.empty()) continue;
        const auto [lo, hi] = family_range(d);
        if (lo > 0.0) c = std::max({c, hi, 1.0 / lo});
    }
    return c;
}

}  // namespace

AgentSet ExperimentConfig::build_agents() const {
    const double cc = c > 0.0 ? c : implied_c(*this);
    std::vector<UtilitySpec> specs;
    for (const auto& d : agents) specs.push_back(build_agent(d, cc, order));
    return AgentSet(std::move(specs));
}

MarketModel ExperimentConfig::build_model() const {
    MarketModel m;
    m.endowment = build_payoff(endowment);
    for (const auto& d : dividends) m.dividends.push_back(build_payoff(d));
    return m;
}

OrderFlow ExperimentConfig::build_flow() const {
    const auto J = static_cast<Eigen::Index>(this->J());
    const Vec q0 = q.empty() ? Vec::Zero(J) : to_vec(q);
    if (flow_kind == "constant") return OrderFlow::constant(q0);
    if (flow_kind == "piecewise") {
        std::vector<double> times;
        std::vector<Vec> values;
        for (const auto& [t, v] : schedule) {
            times.push_back(t);
            values.push_back(to_vec(v));
        }
        return OrderFlow::piecewise(times, values);
    }
    const Vec qa = q_after.empty() ? Vec::Zero(J) : to_vec(q_after);
    return OrderFlow::feedback(q0, t_on, qa, gain_B, gain_logU, bound);
}

Vec ExperimentConfig::initial_weights() const {
    return v0.empty() ? Vec::Ones(static_cast<Eigen::Index>(M())) : to_vec(v0);
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& what) { throw ConfigError("'" + key + "': " + what, 0, key); };
    if (agents.empty()) fail("agents.list", "at least one agent is required");
    if (c < 0.0) fail("agents.c", "must be non-negative");
    if (order < 3 || order > 12) fail("agents.order", "must lie in 3..12");
    for (const auto& d : agents) {
        if (d.name == "exponential") {
            if (d.args.size() != 1 || !(d.args[0] > 0.0)) fail("agents.list", "exponential(a) needs a > 0");
        } else if (d.args.size() < 1) {
            fail("agents.list", "family '" + d.name + "' needs parameters");
        }
    }
    try {
        build_agents();
    } catch (const Error& e) {
        fail("agents.list", e.what());
    }
    try {
        build_payoff(endowment);
    } catch (const Error& e) {
        fail("model.endowment", e.what());
    }
    for (const auto& d : dividends) {
        try {
            build_payoff(d);
        } catch (const Error& e) {
            fail("model.dividends", e.what());
        }
    }
    if (flow_kind != "constant" && flow_kind != "piecewise" && flow_kind != "feedback")
        fail("flow.kind", "must be constant, piecewise or feedback");
    if (!q.empty() && q.size() != J()) fail("flow.q", "needs one entry per dividend");
    if (!q_after.empty() && q_after.size() != J()) fail("flow.q_after", "needs one entry per dividend");
    if (flow_kind == "piecewise") {
        if (schedule.empty()) fail("flow.schedule", "required for a piecewise flow");
        if (schedule[0].first != 0.0) fail("flow.schedule", "must start at t = 0");
        for (std::size_t k = 0; k < schedule.size(); ++k) {
            if (schedule[k].second.size() != J()) fail("flow.schedule", "needs one entry per dividend");
            if (k > 0 && !(schedule[k].first > schedule[k - 1].first)) fail("flow.schedule", "times must increase");
        }
    }
    if (flow_kind == "feedback" && !(bound > 0.0)) fail("flow.bound", "feedback flows need a positive bound");
    if (!v0.empty()) {
        if (v0.size() != M()) fail("init.v0", "needs one weight per agent");
        for (double w : v0)
            if (!(w > 0.0)) fail("init.v0", "weights must be positive");
    }
    if (!(sim.dt > 0.0 && sim.dt <= 1.0)) fail("sim.dt", "must lie in (0, 1]");
    const double n = std::round(1.0 / sim.dt);
    if (std::abs(n * sim.dt - 1.0) > 1e-9) fail("sim.dt", "1/dt must be an integer");
    if (sim.n_paths < 1) fail("sim.paths", "must be at least 1");
    if (sim.explosion_eps < 0.0) fail("sim.eps", "must be non-negative");
    if (sim.quadrature_n < 2 || sim.quadrature_n > 4096) fail("sim.quadrature", "must lie in 2..4096");
    if (!(sim.newton_tol > 0.0)) fail("sim.newton_tol", "must be positive");
    if (sim.noise_steps != 0 && sim.noise_steps % static_cast<std::size_t>(n) != 0)
        fail("sim.noise_steps", "must be a multiple of 1/dt");
    if (precision < 1 || precision > 17) fail("output.precision", "must lie in 1..17");
    for (double t : field_t)
        if (t < 0.0 || t > 1.0) fail("fields.t", "times must lie in [0, 1]");
    if (theorem != "all" && theorem != "1" && theorem != "2" && theorem != "3")
        fail("check.theorem", "must be all, 1, 2 or 3");
    for (double p : p_list)
        if (!(p > 0.0)) fail("check.p", "exponents must be positive");
    if (b < 0.0) fail("check.b", "must be non-negative");
}

std::string ExperimentConfig::echo() const {
    std::ostringstream os;
    os << "[agents]\n";
    os << "list = ";
    for (std::size_t i = 0; i < agents.size(); ++i) os << (i ? "; " : "") << agents[i].text();
    os << "\nc = " << format_number(c > 0.0 ? c : implied_c(*this)) << "\n";
    os << "order = " << order << "\n";
    os << "[model]\n";
    os << "endowment = " << endowment.text() << "\n";
    os << "dividends = ";
    for (std::size_t i = 0; i < dividends.size(); ++i) os << (i ? "; " : "") << dividends[i].text();
    os << "\n[flow]\n";
    os << "kind = " << flow_kind << "\n";
    os << "q = " << join(q.empty() ? std::vector<double>(J(), 0.0) : q) << "\n";
    os << "schedule = ";
    for (std::size_t k = 0; k < schedule.size(); ++k)
        os << (k ? "; " : "") << format_number(schedule[k].first) << ": " << join(schedule[k].second);
    os << "\nt_on = " << format_number(t_on) << "\n";
    os << "q_after = " << join(q_after.empty() ? std::vector<double>(J(), 0.0) : q_after) << "\n";
    os << "gain_B = " << format_number(gain_B) << "\n";
    os << "gain_logU = " << format_number(gain_logU) << "\n";
    os << "bound = " << format_number(bound) << "\n";
    os << "[init]\n";
    os << "v0 = " << join(v0.empty() ? std::vector<double>(M(), 1.0) : v0) << "\n";
    os << "x0 = " << format_number(x0) << "\n";
    os << "[sim]\n";
    os << "dt = " << format_number(sim.dt) << "\n";
    os << "paths = " << sim.n_paths << "\n";
    os << "seed = " << sim.seed << "\n";
    os << "eps = " << format_number(sim.explosion_eps) << "\n";
    os << "quadrature = " << sim.quadrature_n << "\n";
    os << "newton_tol = " << format_number(sim.newton_tol) << "\n";
    os << "coordinates = " << (sim.use_log_coordinates ? "log" : "direct") << "\n";
    os << "noise_steps = " << sim.noise_steps << "\n";
    os << "[output]\n";
    os << "dir = " << out_dir << "\n";
    os << "precision = " << precision << "\n";
    os << "write_paths = " << (write_paths ? "true" : "false") << "\n";
    os << "[fields]\n";
    os << "t = " << join(field_t) << "\n";
    os << "z = " << join(field_z) << "\n";
    os << "x = " << join(field_x) << "\n";
    os << "[check]\n";
    os << "theorem = " << theorem << "\n";
    os << "p = " << join(p_list) << "\n";
    os << "functionals = " << (functionals ? "true" : "false") << "\n";
    os << "b = " << format_number(b) << "\n";
    return os.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : echo()) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(const std::string& text) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    std::vector<std::string> sections;
    for (const auto& [name, keys] : schema()) sections.push_back(name);

    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash_pos = raw.find('#');
        const std::string line = trim(hash_pos == std::string::npos ? raw : raw.substr(0, hash_pos));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section))
                throw ConfigError("unknown section '" + section + "'" + suggestion(section, sections), lineno, section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
        const std::string key = trim(line.substr(0, eq));
        if (section.empty()) {
            const std::string hint = suggestion(key, sections);
            throw ConfigError("key '" + key + "' outside any section" + hint, lineno, key);
        }
        const auto& keys = schema().at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("unknown key '" + section + "." + key + "'" + suggestion(key, keys), lineno,
                              section + "." + key);
        const std::string full = section + "." + key;
        if (entries.count(full)) throw ConfigError("duplicate key '" + full + "'", lineno, full);
        entries[full] = {line.substr(eq + 1), lineno};
    }

    const Reader r(std::move(entries));
    ExperimentConfig cfg;
    r.get("agents.list", cfg.agents);
    r.get("agents.c", cfg.c);
    r.get("agents.order", cfg.order);
    r.get("model.endowment", cfg.endowment);
    r.get("model.dividends", cfg.dividends);
    r.get("flow.kind", cfg.flow_kind);
    r.get("flow.q", cfg.q);
    r.get_schedule("flow.schedule", cfg.schedule);
    r.get("flow.t_on", cfg.t_on);
    r.get("flow.q_after", cfg.q_after);
    r.get("flow.gain_B", cfg.gain_B);
    r.get("flow.gain_logU", cfg.gain_logU);
    r.get("flow.bound", cfg.bound);
    r.get("init.v0", cfg.v0);
    r.get("init.x0", cfg.x0);
    r.get("sim.dt", cfg.sim.dt);
    r.get("sim.paths", cfg.sim.n_paths);
    r.get("sim.seed", cfg.sim.seed, 0);
    r.get("sim.eps", cfg.sim.explosion_eps);
    r.get("sim.quadrature", cfg.sim.quadrature_n);
    r.get("sim.newton_tol", cfg.sim.newton_tol);
    std::string coords = "log";
    r.get("sim.coordinates", coords);
    if (coords != "log" && coords != "direct") r.fail("sim.coordinates", "must be log or direct");
    cfg.sim.use_log_coordinates = coords == "log";
    r.get("sim.noise_steps", cfg.sim.noise_steps);
    r.get("output.dir", cfg.out_dir);
    r.get("output.precision", cfg.precision);
    r.get("output.write_paths", cfg.write_paths);
    r.get("fields.t", cfg.field_t);
    r.get("fields.z", cfg.field_z);
    r.get("fields.x", cfg.field_x);
    r.get("check.theorem", cfg.theorem);
    r.get("check.p", cfg.p_list);
    r.get("check.functionals", cfg.functionals);
    r.get("check.b", cfg.b);

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        if (r.has(e.key())) throw ConfigError(std::string(e.what()), r.line(e.key()), e.key());
        throw;
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace pim
