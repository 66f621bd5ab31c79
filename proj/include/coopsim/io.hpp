#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coopsim/sim.hpp"

namespace coopsim {

/// Everything a CLI invocation needs, parsed from flat `key = value` text.
struct RunConfig {
    Scenario scenario;
    std::vector<double> v_list;
    std::filesystem::path out_dir = ".";
    long long baseline_slots = 200000;
    bool force_no_coop = false;
    double grid_step = 0.0;  ///< 0 selects the closed-form oracle
};

/// Parses configuration text. Lines are `key = value`; `#` starts a comment.
/// Unknown or repeated keys, missing required keys and out-of-range values
/// raise ConfigError before anything is returned.
///
/// Required: lambda_pu, lambda_su, p_avg, and either phi_nc/phi_c (two-point
/// set) or power_levels/phi/mu_su (multi-level set).
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Comma-separated numbers ("10, 50, 100").
std::vector<double> parse_number_list(std::string_view text);

/// "350:0.2, 700:0.55"
std::vector<LambdaChange> parse_lambda_schedule(std::string_view text);

// CSV schemas (a leading `# ...` line records generator and seed):
//   frames.csv : frame,frame_len,admitted,served,power_idle,power_coop,q_su_end,x_su_end
//   summary.csv: policy,v,throughput_admitted,throughput_served,avg_power,max_q_su,seed
//   sweep.csv  : v,throughput_admitted,avg_q_su,avg_power

void write_frames_csv(std::ostream& os, const RunMetrics& metrics);
void write_summary_csv(std::ostream& os, const RunMetrics& metrics);
void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, RunMetrics>>& results);

/// Reads back frames.csv rows (fields not in the schema are left default).
std::vector<FrameRecord> read_frames_csv(std::istream& is);

struct SweepRow {
    double v = 0.0;
    double throughput_admitted = 0.0;
    double avg_q_su = 0.0;
    double avg_power = 0.0;
};

std::vector<SweepRow> read_sweep_csv(std::istream& is);

}  // namespace coopsim
