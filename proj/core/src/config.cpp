#include "descent/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "descent/errors.hpp"

namespace descent {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::int64_t x = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: '" + key + "' expects an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config: '" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<std::int64_t> out;
    std::stringstream ss(value);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_int(key, trim(cell)));
    if (out.empty()) throw ConfigError("config: '" + key + "' expects a list");
    return out;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::stringstream ss(text);
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: empty key at line " + std::to_string(line_no));
        kv[key] = value;
    }
    return kv;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config: override '" + assignment + "' is not KEY=VALUE");
    kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

RunConfig run_config_from(const KeyValues& kv) {
    RunConfig cfg;

    auto value_of = [&](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };

    // optimizer id first: it decides the hyperparameter defaults
    OptimizerId id = OptimizerId::sgd;
    if (const std::string* v = value_of("optimizer.id")) {
        auto parsed = optimizer_from_string(*v);
        if (!parsed) throw ConfigError("config: unknown optimizer id '" + *v + "'");
        id = *parsed;
    }
    cfg.optimizer = default_spec(id);

    if (const std::string* v = value_of("run.steps"))
        cfg.steps = parse_int("run.steps", *v);
    if (cfg.steps < 1) throw ConfigError("config: run.steps must be >= 1");

    // the built-in ranger21 schedule spans the whole run unless overridden
    if (cfg.optimizer.schedule.kind == ScheduleKind::ranger21)
        cfg.optimizer.schedule = ranger21_schedule(cfg.steps, cfg.optimizer.hp.beta2);

    std::set<std::string> known = {"optimizer.id", "run.steps"};
    auto take_double = [&](const char* key, double& field) {
        known.insert(key);
        if (const std::string* v = value_of(key)) field = parse_double(key, *v);
    };
    auto take_int = [&](const char* key, std::int64_t& field) {
        known.insert(key);
        if (const std::string* v = value_of(key)) field = parse_int(key, *v);
    };
    auto take_string = [&](const char* key, std::string& field) {
        known.insert(key);
        if (const std::string* v = value_of(key)) field = *v;
    };

    Hyperparameters& hp = cfg.optimizer.hp;
    take_double("optimizer.eta", hp.eta);
    take_double("optimizer.gamma", hp.gamma);
    take_double("optimizer.beta0", hp.beta0);
    take_double("optimizer.beta1", hp.beta1);
    take_double("optimizer.beta2", hp.beta2);
    take_double("optimizer.beta3", hp.beta3);
    take_double("optimizer.eps", hp.eps);
    take_double("optimizer.eps1", hp.eps1);
    take_double("optimizer.eps2", hp.eps2);
    take_double("optimizer.eps_c", hp.eps_c);
    take_double("optimizer.lambda", hp.lambda);
    take_double("optimizer.sigma", hp.sigma);
    take_double("optimizer.delta", hp.delta);
    take_double("optimizer.tau_c", hp.tau_c);
    take_double("optimizer.gamma_l", hp.gamma_l);
    take_double("optimizer.gamma_u", hp.gamma_u);
    take_double("optimizer.alpha", hp.alpha);
    take_double("optimizer.beta_la", hp.beta_la);
    take_double("optimizer.e", hp.e);
    take_int("optimizer.k", hp.k);
    take_int("optimizer.p", hp.p);
    take_int("optimizer.ns_iters", hp.ns_iters);
    take_int("optimizer.probes", hp.probes);
    known.insert("optimizer.paper_literal_decay_sign");
    if (const std::string* v = value_of("optimizer.paper_literal_decay_sign"))
        hp.paper_literal_decay_sign = parse_bool("optimizer.paper_literal_decay_sign", *v);
    known.insert("optimizer.inner");
    if (const std::string* v = value_of("optimizer.inner")) {
        auto parsed = optimizer_from_string(*v);
        if (!parsed) throw ConfigError("config: unknown inner optimizer '" + *v + "'");
        cfg.optimizer.inner = *parsed;
    }

    ScheduleSpec& sched = cfg.optimizer.schedule;
    known.insert("schedule.kind");
    if (const std::string* v = value_of("schedule.kind")) {
        if (*v == "constant") sched = ScheduleSpec{};
        else if (*v == "cosine") sched = ScheduleSpec{ScheduleKind::cosine_restarts};
        else if (*v == "ranger21") sched = ranger21_schedule(cfg.steps, hp.beta2);
        else if (*v == "relative") sched = ScheduleSpec{ScheduleKind::relative};
        else throw ConfigError("config: unknown schedule kind '" + *v + "'");
        sched.kind = *v == "constant"    ? ScheduleKind::constant
                     : *v == "cosine"    ? ScheduleKind::cosine_restarts
                     : *v == "ranger21"  ? ScheduleKind::ranger21
                                         : ScheduleKind::relative;
    }
    known.insert("schedule.periods");
    if (const std::string* v = value_of("schedule.periods"))
        sched.periods = parse_int_list("schedule.periods", *v);
    take_double("schedule.eta_min", sched.eta_min);
    take_double("schedule.eta_max", sched.eta_max);
    take_int("schedule.t_max", sched.t_max);
    take_int("schedule.t_wup", sched.t_wup);
    take_int("schedule.t_wdown", sched.t_wdown);
    take_double("schedule.beta2", sched.beta2);
    take_double("schedule.q_cap", sched.q_cap);

    ProblemConfig& prob = cfg.problem;
    take_string("problem.name", prob.name);
    take_int("problem.dim", prob.dim);
    take_double("problem.cond", prob.cond);
    take_string("problem.wstar", prob.wstar);
    take_double("problem.x0", prob.x0);
    take_double("problem.noise", prob.noise);
    take_string("problem.csv", prob.csv);
    take_double("problem.l2", prob.l2);
    take_int("problem.batch_size", prob.batch_size);
    take_int("problem.rows", prob.rows);
    take_int("problem.cols", prob.cols);

    known.insert("run.seed");
    if (const std::string* v = value_of("run.seed"))
        cfg.seed = static_cast<std::uint64_t>(parse_int("run.seed", *v));
    take_string("run.trace", cfg.trace_path);
    take_int("run.log_every", cfg.log_every);
    take_double("run.threshold", cfg.threshold);

    for (const auto& [key, value] : kv) {
        if (!known.contains(key))
            throw ConfigError("config: unknown key '" + key + "'");
    }

    if (cfg.log_every < 1) throw ConfigError("config: run.log_every must be >= 1");
    // probe streams follow the run seed unless pinned explicitly
    hp.probe_seed = cfg.seed;
    cfg.optimizer.validate();
    return cfg;
}

namespace {

LayoutPtr layout_for(const ProblemConfig& cfg) {
    if (cfg.rows > 0 || cfg.cols > 0) {
        if (cfg.rows * cfg.cols != cfg.dim)
            throw ConfigError("config: problem.rows * problem.cols must equal problem.dim");
        return single_tensor_layout("w", {cfg.rows, cfg.cols}, TensorKind::matrix2d);
    }
    return nullptr;  // problems default to a single vector tensor
}

// Diagonal SPD matrix with eigenvalues linearly spaced in [1, cond].
std::vector<double> spd_diagonal(std::int64_t dim, double cond) {
    std::vector<double> a(static_cast<std::size_t>(dim * dim), 0.0);
    for (std::int64_t i = 0; i < dim; ++i) {
        const double frac = dim > 1 ? static_cast<double>(i) / static_cast<double>(dim - 1)
                                    : 0.0;
        a[i * dim + i] = 1.0 + (cond - 1.0) * frac;
    }
    return a;
}

}  // namespace

ProblemPtr make_problem(const ProblemConfig& cfg, std::uint64_t seed) {
    if (cfg.name == "quadratic" || cfg.name == "noisy_quadratic") {
        if (cfg.dim < 1) throw ConfigError("config: problem.dim must be >= 1");
        if (cfg.cond < 1.0) throw ConfigError("config: problem.cond must be >= 1");
        std::vector<double> a = spd_diagonal(cfg.dim, cfg.cond);
        std::vector<double> b(static_cast<std::size_t>(cfg.dim), 0.0);
        if (cfg.wstar == "ones") {
            for (std::int64_t i = 0; i < cfg.dim; ++i) b[i] = a[i * cfg.dim + i];
        } else if (cfg.wstar != "zero") {
            throw ConfigError("config: problem.wstar must be 'zero' or 'ones'");
        }
        LayoutPtr layout = layout_for(cfg);
        if (cfg.name == "quadratic")
            return quadratic_problem(std::move(a), std::move(b), std::move(layout));
        return noisy_quadratic_problem(std::move(a), std::move(b), cfg.noise, seed,
                                       std::move(layout));
    }
    if (cfg.name == "rosenbrock") return rosenbrock_problem(cfg.dim);
    if (cfg.name == "logistic") {
        if (cfg.csv.empty()) throw ConfigError("config: logistic needs problem.csv");
        return logistic_problem(load_csv_dataset(cfg.csv), cfg.l2, cfg.batch_size, seed);
    }
    throw ConfigError("config: unknown problem '" + cfg.name + "'");
}

ParameterSet initial_params(const ProblemConfig& cfg, const Problem& problem) {
    return fill_params(problem.layout(), cfg.x0);
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty()) return path;
    namespace fs = std::filesystem;
    if (fs::path(path).is_absolute()) return path;
    if (const char* dir = std::getenv("DESCENT_OUT_DIR"))
        return (fs::path(dir) / path).string();
    return path;
}

}  // namespace descent
