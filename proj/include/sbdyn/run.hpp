// Run orchestration behind the CLI subcommands: single observable runs,
// dt-convergence studies, cross-solver comparisons, variance profiles and
// the bath-table dump. Every output file starts with '#' header lines
// carrying the version, the seed, C_b and the full configuration echo.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sbdyn/config.hpp"
#include "sbdyn/inchworm.hpp"

namespace sbdyn::run {

inline constexpr const char* kVersion = "0.2.0";

struct ObservablePoint {
    double tau;
    cplx value;
    double std_error;
};

// bath pieces assembled once per run; the correlation table spans [-2t, 2t]
struct Workspace {
    bath::BathModes modes;
    bath::CorrelationTable corr;
};

Workspace make_workspace(const cli::RunSpec& spec);

inchworm::SolveResult solve_table(const cli::RunSpec& spec, const Workspace& ws);

// observable along the anti-diagonal of a solved table, with the last-step
// sampling std error of the corresponding entry (diagnostic; errors from
// earlier steps of the sweep are not propagated)
std::vector<ObservablePoint> observable_curve(const cli::RunSpec& spec,
                                              const inchworm::SolveResult& solved);

void run_single(const cli::RunSpec& spec, std::ostream& log);
void run_converge(const cli::RunSpec& spec, const std::vector<double>& h_list, double ref_h,
                  const std::vector<double>& probe_times, std::ostream& log);
void run_compare(const cli::RunSpec& spec, std::ostream& log);
void run_variance(const cli::RunSpec& spec, const std::vector<double>& lengths, std::ostream& log);
void run_dump_bath(const cli::RunSpec& spec, std::ostream& log);

}  // namespace sbdyn::run
