#include "sbdyn/config.hpp"

#include <fstream>
#include <sstream>

namespace sbdyn::cli {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for " + key + ": '" + value + "'");
    }
}

long long to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed for " + key + ": '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

Mat2 rho_by_name(const std::string& name) {
    if (name == "up") return {1.0, 0.0, 0.0, 0.0};
    if (name == "down") return {0.0, 0.0, 0.0, 1.0};
    if (name == "mixed") return {0.5, 0.0, 0.0, 0.5};
    throw ConfigError("config: system.rho must be up, down or mixed, got '" + name + "'");
}

Mat2 observable_by_name(const std::string& name) {
    if (name == "sigma_z") return pauli::z;
    if (name == "sigma_x") return pauli::x;
    if (name == "sigma_y") return pauli::y;
    throw ConfigError("config: system.observable must be sigma_z, sigma_x or sigma_y");
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) + " has no '='");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
        if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        kv[key] = value;
    }
    return kv;
}

KeyValues read_key_values_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

RunSpec spec_from_key_values(const KeyValues& kv) {
    RunSpec spec;
    KeyValues rest = kv;
    std::string slot;
    auto take = [&rest, &slot](const std::string& key) -> std::string* {
        auto it = rest.find(key);
        if (it == rest.end()) return nullptr;
        slot = it->second;
        rest.erase(it);
        return &slot;
    };

    if (auto* v = take("system.epsilon")) spec.system.epsilon = to_double("system.epsilon", *v);
    if (auto* v = take("system.delta")) spec.system.delta = to_double("system.delta", *v);
    if (auto* v = take("system.rho")) spec.rho_name = *v;
    if (auto* v = take("system.observable")) spec.observable_name = *v;
    spec.system.rho = rho_by_name(spec.rho_name);
    spec.system.observable = observable_by_name(spec.observable_name);

    if (auto* v = take("bath.L")) spec.bath.L = static_cast<int>(to_int("bath.L", *v));
    if (auto* v = take("bath.beta")) spec.bath.beta = to_double("bath.beta", *v);
    if (auto* v = take("bath.omega_c")) spec.bath.omega_c = to_double("bath.omega_c", *v);
    if (auto* v = take("bath.omega_max")) spec.bath.omega_max = to_double("bath.omega_max", *v);
    if (auto* v = take("bath.xi")) spec.bath.xi = to_double("bath.xi", *v);
    if (auto* v = take("bath.table_step")) spec.bath_table_step = to_double("bath.table_step", *v);
    if (auto* v = take("bath.literal_difference"))
        spec.literal_difference = to_bool("bath.literal_difference", *v);

    if (auto* v = take("solver.M")) spec.solver.truncation = static_cast<int>(to_int("solver.M", *v));
    if (auto* v = take("solver.mode")) {
        if (*v == "quadrature") spec.solver.mode = inchworm::SumMode::quadrature;
        else if (*v == "mc") spec.solver.mode = inchworm::SumMode::monte_carlo;
        else throw ConfigError("config: solver.mode must be quadrature or mc");
    }
    if (auto* v = take("solver.integrator")) {
        if (*v == "heun") spec.solver.integrator = inchworm::Integrator::heun;
        else if (*v == "exp-heun") spec.solver.integrator = inchworm::Integrator::exponential_heun;
        else throw ConfigError("config: solver.integrator must be heun or exp-heun");
    }
    if (auto* v = take("solver.samples_per_order"))
        spec.solver.samples_per_order = to_int("solver.samples_per_order", *v);
    if (auto* v = take("solver.connected_cap"))
        spec.solver.connected_cap = static_cast<int>(to_int("solver.connected_cap", *v));

    if (auto* v = take("dyson.M")) spec.dyson_truncation = static_cast<int>(to_int("dyson.M", *v));
    if (auto* v = take("dyson.samples_per_order"))
        spec.dyson_samples_per_order = to_int("dyson.samples_per_order", *v);

    if (auto* v = take("run.t_final")) spec.t_final = to_double("run.t_final", *v);
    if (auto* v = take("run.N")) spec.n_steps = static_cast<int>(to_int("run.N", *v));
    if (auto* v = take("run.seed")) spec.solver.seed = to_u64("run.seed", *v);
    if (auto* v = take("run.threads")) spec.solver.threads = static_cast<int>(to_int("run.threads", *v));

    if (auto* v = take("output.path")) spec.out_path = *v;
    if (auto* v = take("output.table")) spec.table_path = *v;
    if (auto* v = take("comparison.reference")) spec.reference_path = *v;

    if (!rest.empty()) {
        std::string keys;
        for (const auto& [k, _] : rest) keys += (keys.empty() ? "" : ", ") + k;
        throw ConfigError("config: unknown key(s): " + keys);
    }
    spec.validate();
    return spec;
}

void RunSpec::validate() const {
    if (t_final <= 0.0) throw ConfigError("config: run.t_final must be positive");
    if (n_steps < 1) throw ConfigError("config: run.N must be >= 1");
    try {
        bath.validate();
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (dyson_truncation < 0 || dyson_truncation % 2 != 0 || dyson_truncation > 8)
        throw ConfigError("config: dyson.M must be even and <= 8");
    if (dyson_samples_per_order < 1)
        throw ConfigError("config: dyson.samples_per_order must be >= 1");
    if (bath_table_step <= 0.0) throw ConfigError("config: bath.table_step must be positive");
}

std::string serialize(const RunSpec& spec) {
    std::ostringstream os;
    os << "system.epsilon = " << format_double(spec.system.epsilon) << "\n";
    os << "system.delta = " << format_double(spec.system.delta) << "\n";
    os << "system.rho = " << spec.rho_name << "\n";
    os << "system.observable = " << spec.observable_name << "\n";
    os << "bath.L = " << spec.bath.L << "\n";
    os << "bath.beta = " << format_double(spec.bath.beta) << "\n";
    os << "bath.omega_c = " << format_double(spec.bath.omega_c) << "\n";
    os << "bath.omega_max = " << format_double(spec.bath.omega_max) << "\n";
    os << "bath.xi = " << format_double(spec.bath.xi) << "\n";
    os << "bath.table_step = " << format_double(spec.bath_table_step) << "\n";
    os << "bath.literal_difference = " << (spec.literal_difference ? "true" : "false") << "\n";
    os << "solver.M = " << spec.solver.truncation << "\n";
    os << "solver.mode = "
       << (spec.solver.mode == inchworm::SumMode::quadrature ? "quadrature" : "mc") << "\n";
    os << "solver.integrator = "
       << (spec.solver.integrator == inchworm::Integrator::heun ? "heun" : "exp-heun") << "\n";
    os << "solver.samples_per_order = " << spec.solver.samples_per_order << "\n";
    os << "solver.connected_cap = " << spec.solver.connected_cap << "\n";
    os << "dyson.M = " << spec.dyson_truncation << "\n";
    os << "dyson.samples_per_order = " << spec.dyson_samples_per_order << "\n";
    os << "run.t_final = " << format_double(spec.t_final) << "\n";
    os << "run.N = " << spec.n_steps << "\n";
    os << "run.seed = " << spec.solver.seed << "\n";
    os << "run.threads = " << spec.solver.threads << "\n";
    if (!spec.out_path.empty()) os << "output.path = " << spec.out_path << "\n";
    if (!spec.table_path.empty()) os << "output.table = " << spec.table_path << "\n";
    if (!spec.reference_path.empty()) os << "comparison.reference = " << spec.reference_path << "\n";
    return os.str();
}

}  // namespace sbdyn::cli
