#include "sbdyn/run.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sbdyn/dyson.hpp"

namespace sbdyn::run {

namespace {

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
    os.precision(17);
    return os;
}

void write_header(std::ostream& os, const cli::RunSpec& spec, const std::string& command,
                  double c_b) {
    os << "# sbdyn " << kVersion << " " << command << " seed=" << spec.solver.seed
       << " C_b=" << c_b << "\n";
    std::istringstream cfg(cli::serialize(spec));
    std::string line;
    while (std::getline(cfg, line)) os << "# cfg " << line << "\n";
}

std::string out_path_or(const cli::RunSpec& spec, const std::string& fallback) {
    return spec.out_path.empty() ? fallback : spec.out_path;
}

// reference CSV: '#' comments, rows "tau,value[,...]"
std::vector<std::pair<double, double>> read_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference file '" + path + "'");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tau_s, val_s;
        if (!std::getline(ls, tau_s, ',') || !std::getline(ls, val_s, ',')) continue;
        rows.emplace_back(std::stod(tau_s), std::stod(val_s));
    }
    return rows;
}

}  // namespace

Workspace make_workspace(const cli::RunSpec& spec) {
    Workspace ws;
    ws.modes = bath::build_modes(spec.bath);
    ws.corr = bath::CorrelationTable::tabulate(ws.modes, spec.bath.beta, 2.0 * spec.t_final,
                                               spec.bath_table_step);
    ws.corr.set_literal_difference(spec.literal_difference);
    return ws;
}

inchworm::SolveResult solve_table(const cli::RunSpec& spec, const Workspace& ws) {
    return inchworm::solve(spec.system, ws.corr, spec.solver, spec.n_steps, spec.dt());
}

std::vector<ObservablePoint> observable_curve(const cli::RunSpec& spec,
                                              const inchworm::SolveResult& solved) {
    auto traced = contour::antidiagonal_observables(solved.table, spec.system.rho);
    std::vector<ObservablePoint> curve;
    curve.reserve(traced.size());
    int n = solved.table.n_steps();
    for (int k = n; k >= 0; --k) {
        int row = k == n ? solved.table.row_plus() : 2 * n - k + 1;
        const auto& [tau, value] = traced[n - k];
        curve.push_back({tau, value, solved.std_error_at(row, k)});
    }
    return curve;
}

void run_single(const cli::RunSpec& spec, std::ostream& log) {
    Workspace ws = make_workspace(spec);
    inchworm::SolveResult solved = solve_table(spec, ws);
    auto curve = observable_curve(spec, solved);

    std::ofstream os = open_output(out_path_or(spec, "single.csv"));
    write_header(os, spec, "single", ws.corr.c_b());
    os << "# tau,re,im,std_error\n";
    for (const auto& pt : curve)
        os << pt.tau << "," << pt.value.real() << "," << pt.value.imag() << "," << pt.std_error
           << "\n";

    if (!spec.table_path.empty()) {
        std::ofstream ts = open_output(spec.table_path);
        write_header(ts, spec, "single:table", ws.corr.c_b());
        solved.table.write_csv(ts);
    }

    if (!spec.reference_path.empty()) {
        auto reference = read_reference(spec.reference_path);
        double max_dev = 0.0, sum_dev = 0.0;
        long matched = 0;
        for (const auto& [tau, ref] : reference) {
            for (const auto& pt : curve) {
                if (std::abs(pt.tau - tau) < 1e-9) {
                    double dev = std::abs(pt.value.real() - ref);
                    max_dev = std::max(max_dev, dev);
                    sum_dev += dev;
                    ++matched;
                    break;
                }
            }
        }
        if (matched == 0)
            log << "reference: no matching time points in '" << spec.reference_path << "'\n";
        else
            log << "reference: matched " << matched << " points, max |dev| = " << max_dev
                << ", mean |dev| = " << sum_dev / matched << "\n";
    }
    log << "single: wrote " << curve.size() << " rows to " << out_path_or(spec, "single.csv")
        << " (C_b = " << ws.corr.c_b() << ")\n";
}

void run_converge(const cli::RunSpec& spec, const std::vector<double>& h_list, double ref_h,
                  const std::vector<double>& probe_times, std::ostream& log) {
    if (spec.solver.mode != inchworm::SumMode::quadrature || spec.solver.truncation != 1)
        throw cli::ConfigError("converge: requires the deterministic solver (solver.mode = "
                               "quadrature, solver.M = 1)");
    if (h_list.empty() || probe_times.empty())
        throw cli::ConfigError("converge: empty h list or probe list");

    auto steps_for = [&](double h) {
        double n = spec.t_final / h;
        if (std::abs(n - std::round(n)) > 1e-9 * n)
            throw cli::ConfigError("converge: step does not divide t_final");
        return static_cast<int>(std::round(n));
    };
    auto probe_index = [&](double h, double probe) {
        double k = probe / h;
        if (std::abs(k - std::round(k)) > 1e-9 * std::max(k, 1.0))
            throw cli::ConfigError("converge: step does not divide probe time");
        return static_cast<std::size_t>(std::round(k));
    };
    for (double h : h_list)
        for (double p : probe_times) probe_index(h, p);

    Workspace ws = make_workspace(spec);

    auto curve_at = [&](double h) {
        cli::RunSpec r = spec;
        r.n_steps = steps_for(h);
        return observable_curve(r, solve_table(r, ws));
    };

    log << "converge: reference run at h = " << ref_h << "\n";
    auto reference = curve_at(ref_h);
    std::vector<std::vector<double>> errors(h_list.size(), std::vector<double>(probe_times.size()));
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        auto curve = curve_at(h_list[i]);
        for (std::size_t p = 0; p < probe_times.size(); ++p) {
            cplx coarse = curve[probe_index(h_list[i], probe_times[p])].value;
            cplx fine = reference[probe_index(ref_h, probe_times[p])].value;
            errors[i][p] = std::abs(coarse - fine);
        }
        log << "converge: h = " << h_list[i] << " done\n";
    }

    std::ofstream os = open_output(out_path_or(spec, "converge.csv"));
    write_header(os, spec, "converge", ws.corr.c_b());
    os << "# h";
    for (double p : probe_times) os << ",err_t" << p << ",order_t" << p;
    os << "\n";
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        os << h_list[i];
        for (std::size_t p = 0; p < probe_times.size(); ++p) {
            os << "," << errors[i][p] << ",";
            if (i == 0)
                os << "nan";
            else
                os << std::log(errors[i - 1][p] / errors[i][p]) / std::log(h_list[i - 1] / h_list[i]);
        }
        os << "\n";
    }
    log << "converge: wrote " << out_path_or(spec, "converge.csv") << "\n";
}

void run_compare(const cli::RunSpec& spec, std::ostream& log) {
    Workspace ws = make_workspace(spec);

    cli::RunSpec det = spec;
    det.solver.mode = inchworm::SumMode::quadrature;
    det.solver.truncation = 1;
    auto curve_det = observable_curve(det, solve_table(det, ws));

    cli::RunSpec mc = spec;
    mc.solver.mode = inchworm::SumMode::monte_carlo;
    mc.solver.truncation = 3;
    auto curve_mc = observable_curve(mc, solve_table(mc, ws));

    const int bare_orders[3] = {0, 2, 4};
    std::ofstream os = open_output(out_path_or(spec, "compare.csv"));
    write_header(os, spec, "compare", ws.corr.c_b());
    os << "# bare columns: (re, im, std_error) at M = {0, 2, 4}, "
       << spec.dyson_samples_per_order << " samples per order\n";
    os << "# tau";
    for (int m : bare_orders) os << ",bare" << m << "_re,bare" << m << "_im,bare" << m << "_err";
    os << ",iw1_re,iw1_im,iw3_re,iw3_im,iw3_err\n";

    for (std::size_t k = 0; k < curve_det.size(); ++k) {
        double tau = curve_det[k].tau;
        os << tau;
        for (int m : bare_orders) {
            mc::MCEstimate est;
            if (tau == 0.0) {
                est.mean = spin::expectation(spec.system.rho, spec.system.observable);
                est.std_error = 0.0;
            } else {
                est = dyson::bare_observable(spec.system, ws.corr, tau, m,
                                             spec.dyson_samples_per_order, spec.solver.seed,
                                             spec.solver.threads);
            }
            os << "," << est.mean.real() << "," << est.mean.imag() << "," << est.std_error;
        }
        os << "," << curve_det[k].value.real() << "," << curve_det[k].value.imag();
        os << "," << curve_mc[k].value.real() << "," << curve_mc[k].value.imag() << ","
           << curve_mc[k].std_error << "\n";
    }
    log << "compare: wrote " << curve_det.size() << " rows to " << out_path_or(spec, "compare.csv")
        << "\n";
}

void run_variance(const cli::RunSpec& spec, const std::vector<double>& lengths,
                  std::ostream& log) {
    Workspace ws = make_workspace(spec);
    auto points = dyson::variance_profile(spec.system, ws.corr, lengths, spec.dyson_truncation,
                                          spec.dyson_samples_per_order, spec.solver.seed,
                                          spec.solver.threads);
    std::ofstream os = open_output(out_path_or(spec, "variance.csv"));
    write_header(os, spec, "variance", ws.corr.c_b());
    os << "# length,variance,variance_sigma,envelope\n";
    for (const auto& pt : points)
        os << pt.length << "," << pt.variance << "," << pt.variance_sigma << "," << pt.envelope
           << "\n";
    log << "variance: wrote " << points.size() << " rows to " << out_path_or(spec, "variance.csv")
        << "\n";
}

void run_dump_bath(const cli::RunSpec& spec, std::ostream& log) {
    Workspace ws = make_workspace(spec);
    std::ofstream os = open_output(out_path_or(spec, "bath.csv"));
    write_header(os, spec, "dump-bath", ws.corr.c_b());
    ws.corr.write_csv(os);
    log << "dump-bath: wrote " << out_path_or(spec, "bath.csv") << " (C_b = " << ws.corr.c_b()
        << ")\n";
}

}  // namespace sbdyn::run
