#include "coopsim/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace coopsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double to_double(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ConfigError("'" + std::string(key) + "': expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

long long to_integer(std::string_view text, std::string_view key) {
    long long value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || text.empty()) {
        throw ConfigError("'" + std::string(key) + "': expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

bool to_bool(std::string_view text, std::string_view key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("'" + std::string(key) + "': expected true/false, got '" + std::string(text) + "'");
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "lambda_pu", "lambda_su", "a_max", "p_avg", "p_max", "phi_nc", "phi_c", "mu_su_max",
    "power_levels", "phi", "mu_su", "policy", "v", "v_list", "frames", "seed", "window",
    "lambda_schedule", "skip_when_empty", "max_slots", "out_dir", "coop_prob", "idle_tx_prob",
    "baseline_slots", "grid_step", "force_no_coop", "record_frames"};

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<double> parse_number_list(std::string_view text) {
    std::vector<double> out;
    for (auto part : split(text, ',')) {
        if (part.empty()) {
            throw ConfigError("empty entry in number list '" + std::string(text) + "'");
        }
        out.push_back(to_double(part, "list"));
    }
    return out;
}

std::vector<LambdaChange> parse_lambda_schedule(std::string_view text) {
    std::vector<LambdaChange> out;
    if (trim(text).empty()) {
        return out;
    }
    for (auto part : split(text, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string_view::npos) {
            throw ConfigError("lambda_schedule entries must look like 'frame:lambda', got '" + std::string(part) + "'");
        }
        out.push_back({to_integer(trim(part.substr(0, colon)), "lambda_schedule"),
                       to_double(trim(part.substr(colon + 1)), "lambda_schedule")});
    }
    return out;
}

RunConfig parse_config(std::string_view text) {
    std::map<std::string, std::string, std::less<>> kv;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = std::string(trim(view.substr(0, eq)));
        const auto value = std::string(trim(view.substr(eq + 1)));
        if (!kKnownKeys.contains(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!kv.emplace(key, value).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
    }

    auto get = [&](std::string_view key) -> std::optional<std::string_view> {
        if (auto it = kv.find(key); it != kv.end()) {
            return std::string_view(it->second);
        }
        return std::nullopt;
    };
    auto require = [&](std::string_view key) {
        auto v = get(key);
        if (!v) {
            throw ConfigError("missing required key '" + std::string(key) + "'");
        }
        return *v;
    };
    auto number = [&](std::string_view key, double fallback) {
        auto v = get(key);
        return v ? to_double(*v, key) : fallback;
    };

    RunConfig cfg;
    ModelParams params;
    params.lambda_pu = to_double(require("lambda_pu"), "lambda_pu");
    params.lambda_su = to_double(require("lambda_su"), "lambda_su");
    params.p_avg = to_double(require("p_avg"), "p_avg");
    if (auto a = get("a_max")) {
        params.a_max = static_cast<int>(to_integer(*a, "a_max"));
    }

    if (auto levels = get("power_levels")) {
        for (const char* k : {"phi_nc", "phi_c", "mu_su_max", "p_max"}) {
            if (get(k)) {
                throw ConfigError(std::string("'") + k + "' conflicts with power_levels; give phi and mu_su lists");
            }
        }
        params.power_set = PowerSet::grid(parse_number_list(*levels));
        params.phi = parse_number_list(require("phi"));
        params.mu_su = parse_number_list(require("mu_su"));
    } else {
        for (const char* k : {"phi", "mu_su"}) {
            if (get(k)) {
                throw ConfigError(std::string("'") + k + "' requires power_levels");
            }
        }
        const double p_max = number("p_max", 1.0);
        params.power_set = PowerSet::two_point(p_max);
        params.phi = {to_double(require("phi_nc"), "phi_nc"), to_double(require("phi_c"), "phi_c")};
        params.mu_su = {0.0, number("mu_su_max", 1.0)};
    }

    Scenario& sc = cfg.scenario;
    sc.base_params = params;
    if (auto p = get("policy")) {
        sc.policy = PolicySpec::parse(*p);
    }
    sc.policy.coop_prob = number("coop_prob", sc.policy.coop_prob);
    sc.policy.idle_tx_prob = number("idle_tx_prob", sc.policy.idle_tx_prob);
    sc.v = number("v", sc.v);
    if (auto f = get("frames")) sc.horizon_frames = to_integer(*f, "frames");
    if (auto s = get("seed")) {
        const auto seed = to_integer(*s, "seed");
        if (seed < 0) {
            throw ConfigError("'seed' must be non-negative");
        }
        sc.seed = static_cast<std::uint64_t>(seed);
    }
    if (auto w = get("window")) {
        const auto window = to_integer(*w, "window");
        if (window < 1) {
            throw ConfigError("'window' must be at least 1");
        }
        sc.window = static_cast<std::size_t>(window);
    }
    if (auto s = get("lambda_schedule")) sc.lambda_schedule = parse_lambda_schedule(*s);
    if (auto s = get("skip_when_empty")) sc.skip_when_empty = to_bool(*s, "skip_when_empty");
    if (auto s = get("record_frames")) sc.record_frames = to_bool(*s, "record_frames");
    if (auto s = get("max_slots")) sc.max_slots = to_integer(*s, "max_slots");
    if (auto s = get("v_list")) cfg.v_list = parse_number_list(*s);
    if (auto s = get("out_dir")) cfg.out_dir = std::string(*s);
    if (auto s = get("baseline_slots")) cfg.baseline_slots = to_integer(*s, "baseline_slots");
    if (auto s = get("force_no_coop")) cfg.force_no_coop = to_bool(*s, "force_no_coop");
    cfg.grid_step = number("grid_step", 0.0);

    sc.validate();
    for (double v : cfg.v_list) {
        if (!(v > 0.0)) {
            throw ConfigError("v_list entries must be positive");
        }
    }
    if (cfg.baseline_slots < 1) {
        throw ConfigError("baseline_slots must be positive");
    }
    if (cfg.grid_step < 0.0 || cfg.grid_step > 1.0) {
        throw ConfigError("grid_step must lie in [0, 1]");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

void write_header_comment(std::ostream& os, const RunMetrics& m) {
    os << "# generator=" << m.generator << " seed=" << m.seed << " policy=" << m.policy << "\n";
}

std::vector<std::vector<std::string_view>> read_rows(std::istream& is, std::vector<std::string>& storage,
                                                     std::string_view expected_header) {
    storage.clear();
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            if (trim(line) != expected_header) {
                throw std::runtime_error("unexpected CSV header: " + line);
            }
            header_seen = true;
            continue;
        }
        storage.push_back(line);
    }
    std::vector<std::vector<std::string_view>> rows;
    rows.reserve(storage.size());
    for (const auto& s : storage) {
        rows.push_back(split(s, ','));
    }
    return rows;
}

constexpr std::string_view kFramesHeader = "frame,frame_len,admitted,served,power_idle,power_coop,q_su_end,x_su_end";
constexpr std::string_view kSweepHeader = "v,throughput_admitted,avg_q_su,avg_power";

}  // namespace

void write_frames_csv(std::ostream& os, const RunMetrics& m) {
    write_header_comment(os, m);
    os << kFramesHeader << "\n";
    for (const auto& f : m.frames) {
        os << f.frame << ',' << f.frame_len << ',' << f.admitted << ',' << f.served << ','
           << format_double(f.power_idle) << ',' << format_double(f.power_coop) << ',' << f.q_su_end << ','
           << format_double(f.x_su_end) << "\n";
    }
}

void write_summary_csv(std::ostream& os, const RunMetrics& m) {
    write_header_comment(os, m);
    os << "policy,v,throughput_admitted,throughput_served,avg_power,max_q_su,seed\n";
    os << m.policy << ',' << format_double(m.v) << ',' << format_double(m.throughput_admitted()) << ','
       << format_double(m.throughput_served()) << ',' << format_double(m.avg_power()) << ',' << m.max_q_su << ','
       << m.seed << "\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<std::pair<double, RunMetrics>>& results) {
    if (!results.empty()) {
        os << "# generator=" << results.front().second.generator << " base_seed=" << results.front().second.seed
           << " policy=" << results.front().second.policy << "\n";
    }
    os << kSweepHeader << "\n";
    for (const auto& [v, m] : results) {
        os << format_double(v) << ',' << format_double(m.throughput_admitted()) << ','
           << format_double(m.avg_q_su()) << ',' << format_double(m.avg_power()) << "\n";
    }
}

std::vector<FrameRecord> read_frames_csv(std::istream& is) {
    std::vector<std::string> storage;
    std::vector<FrameRecord> out;
    for (const auto& row : read_rows(is, storage, kFramesHeader)) {
        if (row.size() != 8) {
            throw std::runtime_error("frames.csv: expected 8 columns");
        }
        FrameRecord f;
        f.frame = to_integer(row[0], "frame");
        f.frame_len = to_integer(row[1], "frame_len");
        f.admitted = to_integer(row[2], "admitted");
        f.served = to_integer(row[3], "served");
        f.power_idle = to_double(row[4], "power_idle");
        f.power_coop = to_double(row[5], "power_coop");
        f.q_su_end = to_integer(row[6], "q_su_end");
        f.x_su_end = to_double(row[7], "x_su_end");
        out.push_back(f);
    }
    return out;
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
    std::vector<std::string> storage;
    std::vector<SweepRow> out;
    for (const auto& row : read_rows(is, storage, kSweepHeader)) {
        if (row.size() != 4) {
            throw std::runtime_error("sweep.csv: expected 4 columns");
        }
        out.push_back({to_double(row[0], "v"), to_double(row[1], "throughput_admitted"), to_double(row[2], "avg_q_su"),
                       to_double(row[3], "avg_power")});
    }
    return out;
}

}  // namespace coopsim
