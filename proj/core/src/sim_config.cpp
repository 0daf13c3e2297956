#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "clusterfx/sim.hpp"

namespace clusterfx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// lowercase with '_' and '-' removed, so "DiscretizedNormal" == "discretized_normal"
std::string canon(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '_' || ch == '-') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

double to_real(const std::string& key, const std::string& s) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw BadConfigError(key, "not a real number: '" + s + "'");
    return v;
}

long long to_int(const std::string& key, const std::string& s) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw BadConfigError(key, "not an integer: '" + s + "'");
    return v;
}

std::vector<double> to_tuple(const std::string& key, std::string s, std::size_t arity) {
    s = trim(s);
    if (!s.empty() && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    std::vector<double> vals;
    std::string cur;
    std::istringstream parts(s);
    while (std::getline(parts, cur, ',')) vals.push_back(to_real(key, trim(cur)));
    if (vals.size() != arity)
        throw BadConfigError(key, "expected " + std::to_string(arity) + " comma-separated values");
    return vals;
}

Family parse_family(const std::string& s) {
    const std::string c = canon(s);
    if (c == "discretizednormal" || c == "normal") return Family::DiscretizedNormal;
    if (c == "lognormal") return Family::LogNormal;
    if (c == "cauchy") return Family::Cauchy;
    throw BadConfigError("family", "unknown family '" + s + "'");
}

Alternative parse_alternative(const std::string& s) {
    const std::string c = canon(s);
    if (c == "null") return Alternative::Null;
    if (c == "onepoint") return Alternative::OnePoint;
    if (c == "onetime") return Alternative::OneTime;
    if (c == "increasingtrend") return Alternative::IncreasingTrend;
    throw BadConfigError("alternative", "unknown alternative '" + s + "'");
}

}  // namespace

SimulationConfig parse_config(std::istream& in) {
    SimulationConfig cfg;
    std::string line;
    std::string block;  // current block prefix, empty at top level
    while (std::getline(in, line)) {
        std::string t = trim(line);
        std::size_t hash = t.find('#');
        if (hash != std::string::npos) t = trim(t.substr(0, hash));
        if (t.empty()) continue;
        if (t == "}") {
            if (block.empty()) throw BadConfigError("}", "unmatched block close");
            block.clear();
            continue;
        }
        if (t.back() == '{') {
            if (!block.empty()) throw BadConfigError(t, "nested blocks are not supported");
            block = trim(t.substr(0, t.size() - 1));
            if (block != "rho" && block != "sigma2")
                throw BadConfigError(block, "unknown block (expected rho or sigma2)");
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw BadConfigError(t, "expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        const std::string full = block.empty() ? key : block + "." + key;

        if (full == "family") cfg.family = parse_family(val);
        else if (full == "T") cfg.num_groups = static_cast<int>(to_int(full, val));
        else if (full == "n_c") cfg.n_complete = static_cast<int>(to_int(full, val));
        else if (full == "n_1") cfg.n_pre = static_cast<int>(to_int(full, val));
        else if (full == "n_2") cfg.n_post = static_cast<int>(to_int(full, val));
        else if (full == "M") cfg.max_cluster_size = static_cast<int>(to_int(full, val));
        else if (full == "rho") {
            const auto v = to_tuple(full, val, 3);
            cfg.rho = {v[0], v[1], v[2]};
        } else if (full == "rho.rho1") cfg.rho[0] = to_real(full, val);
        else if (full == "rho.rho2") cfg.rho[1] = to_real(full, val);
        else if (full == "rho.rho12") cfg.rho[2] = to_real(full, val);
        else if (full == "sigma2") {
            const auto v = to_tuple(full, val, 2);
            cfg.sigma2 = {v[0], v[1]};
        } else if (full == "sigma2.pre") cfg.sigma2[0] = to_real(full, val);
        else if (full == "sigma2.post") cfg.sigma2[1] = to_real(full, val);
        else if (full == "alternative") cfg.alternative = parse_alternative(val);
        else if (full == "delta") cfg.delta = to_real(full, val);
        else if (full == "runs") cfg.runs = static_cast<int>(to_int(full, val));
        else if (full == "alpha") cfg.alpha = to_real(full, val);
        else if (full == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(full, val));
        else throw BadConfigError(full, "unknown key");
    }
    if (!block.empty()) throw BadConfigError(block, "block is never closed");
    cfg.validate_or_throw();
    return cfg;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    return parse_config(in);
}

std::string config_to_string(const SimulationConfig& cfg) {
    std::ostringstream out;
    char buf[160];
    out << "family = " << family_name(cfg.family) << "\n";
    out << "T = " << cfg.num_groups << "\n";
    out << "n_c = " << cfg.n_complete << "\n";
    out << "n_1 = " << cfg.n_pre << "\n";
    out << "n_2 = " << cfg.n_post << "\n";
    out << "M = " << cfg.max_cluster_size << "\n";
    std::snprintf(buf, sizeof(buf), "rho = %.17g, %.17g, %.17g\n", cfg.rho[0], cfg.rho[1],
                  cfg.rho[2]);
    out << buf;
    std::snprintf(buf, sizeof(buf), "sigma2 = %.17g, %.17g\n", cfg.sigma2[0], cfg.sigma2[1]);
    out << buf;
    out << "alternative = " << alternative_name(cfg.alternative) << "\n";
    std::snprintf(buf, sizeof(buf), "delta = %.17g\n", cfg.delta);
    out << buf;
    out << "runs = " << cfg.runs << "\n";
    std::snprintf(buf, sizeof(buf), "alpha = %.17g\n", cfg.alpha);
    out << buf;
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

}  // namespace clusterfx
