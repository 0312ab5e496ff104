// sbdyn — spin-boson real-time dynamics on the unfolded contour.
//
//   sbdyn <single|converge|compare|variance|dump-bath>
//         [--config PATH] [--seed U64] [--out PATH] [--threads K] ...
//
// Exit codes: 0 success, 2 configuration error, 3 runtime/IO error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sbdyn/config.hpp"
#include "sbdyn/run.hpp"

namespace {

using sbdyn::cli::ConfigError;

struct CliOptions {
    std::string command;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> threads;
    std::vector<double> h_list = {1.0 / 10, 1.0 / 20, 1.0 / 30, 1.0 / 40, 1.0 / 50, 1.0 / 60};
    double ref_h = 1.0 / 320;
    std::vector<double> probes = {0.5, 1.0, 1.5, 2.0};
    std::vector<double> lengths = {1.0, 2.0, 3.0, 4.0};
};

std::vector<double> parse_list(const std::string& arg, const std::string& flag) {
    std::vector<double> values;
    std::istringstream is(arg);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad value in " + flag + ": '" + item + "'");
        }
    }
    if (values.empty()) throw ConfigError(flag + " needs a comma-separated list");
    return values;
}

void print_usage(std::ostream& os) {
    os << "usage: sbdyn <command> [options]\n"
          "\n"
          "commands:\n"
          "  single      solve and write the observable curve <O(tau)>\n"
          "  converge    dt-refinement study against a fine self-reference\n"
          "  compare     bare dQMC (M = 0,2,4) vs solver M = 1 and M = 3 columns\n"
          "  variance    bare-estimator variance vs contour length, with envelope\n"
          "  dump-bath   tabulated bath correlation function as CSV\n"
          "\n"
          "options:\n"
          "  --config PATH    key-value configuration file\n"
          "  --seed U64       override run.seed\n"
          "  --out PATH       override output.path\n"
          "  --threads K      override run.threads\n"
          "  --h-list A,B,..  (converge) step sizes, default 1/10..1/60\n"
          "  --ref-h H        (converge) reference step, default 1/320\n"
          "  --probes A,B,..  (converge) probe times, default 0.5,1,1.5,2\n"
          "  --lengths A,B,.. (variance) contour lengths, default 1,2,3,4\n";
}

CliOptions parse_cli(int argc, char** argv) {
    if (argc < 2) throw ConfigError("missing command");
    CliOptions opt;
    opt.command = argv[1];
    for (int i = 2; i < argc; ++i) {
        std::string flag = argv[i];
        auto value = [&]() -> std::string {
            if (i + 1 >= argc) throw ConfigError("flag " + flag + " needs a value");
            return argv[++i];
        };
        if (flag == "--config") opt.config_path = value();
        else if (flag == "--seed") opt.seed = std::stoull(value());
        else if (flag == "--out") opt.out = value();
        else if (flag == "--threads") opt.threads = std::stoi(value());
        else if (flag == "--h-list") opt.h_list = parse_list(value(), "--h-list");
        else if (flag == "--ref-h") opt.ref_h = std::stod(value());
        else if (flag == "--probes") opt.probes = parse_list(value(), "--probes");
        else if (flag == "--lengths") opt.lengths = parse_list(value(), "--lengths");
        else throw ConfigError("unknown flag: " + flag);
    }
    return opt;
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions opt;
    sbdyn::cli::RunSpec spec;
    try {
        opt = parse_cli(argc, argv);
        if (opt.command == "help" || opt.command == "--help" || opt.command == "-h") {
            print_usage(std::cout);
            return 0;
        }
        sbdyn::cli::KeyValues kv;
        if (!opt.config_path.empty()) kv = sbdyn::cli::read_key_values_file(opt.config_path);
        spec = sbdyn::cli::spec_from_key_values(kv);
        if (opt.seed) spec.solver.seed = *opt.seed;
        if (opt.out) spec.out_path = *opt.out;
        if (opt.threads) {
            spec.solver.threads = *opt.threads;
            spec.solver.validate();
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        print_usage(std::cerr);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (opt.command == "single") {
            sbdyn::run::run_single(spec, std::cout);
        } else if (opt.command == "converge") {
            sbdyn::run::run_converge(spec, opt.h_list, opt.ref_h, opt.probes, std::cout);
        } else if (opt.command == "compare") {
            sbdyn::run::run_compare(spec, std::cout);
        } else if (opt.command == "variance") {
            sbdyn::run::run_variance(spec, opt.lengths, std::cout);
        } else if (opt.command == "dump-bath") {
            sbdyn::run::run_dump_bath(spec, std::cout);
        } else {
            std::cerr << "error: unknown command '" << opt.command << "'\n\n";
            print_usage(std::cerr);
            return 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
