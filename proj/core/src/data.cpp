#include "clusterfx/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace clusterfx {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

long long parse_int(const std::string& s, std::size_t line, const char* what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw MalformedRowError(line, std::string(what) + " is not an integer: '" + s + "'");
    }
    return v;
}

double parse_real(const std::string& s, std::size_t line) {
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw MalformedRowError(line, "value is not a real number: '" + s + "'");
    }
    if (!std::isfinite(v)) {
        throw MalformedRowError(line, "value is not finite: '" + s + "'");
    }
    return v;
}

constexpr const char* kHeader = "group,cluster,period,visit,value";

}  // namespace

StudyData StudyData::from_clusters(int num_groups, std::vector<ClusterRecord> clusters) {
    if (num_groups < 1) throw DimensionError("number of groups must be at least 1");
    StudyData d;
    d.num_groups_ = num_groups;
    d.clusters_ = std::move(clusters);
    const int cells = 2 * num_groups;
    d.complete_idx_.resize(num_groups);
    d.incomplete_idx_.resize(cells);
    d.n_cell_.assign(cells, 0);
    d.n_cell_complete_.assign(cells, 0);
    d.sorted_.resize(cells);

    for (std::size_t i = 0; i < d.clusters_.size(); ++i) {
        const ClusterRecord& c = d.clusters_[i];
        if (c.group < 1 || c.group > num_groups) {
            throw DimensionError("cluster '" + c.id + "' has group label " +
                                 std::to_string(c.group) + " outside 1.." +
                                 std::to_string(num_groups));
        }
        if (c.pre.empty() && c.post.empty()) {
            throw Error("cluster '" + c.id + "' has no observations in either period");
        }
        const int j = c.group - 1;
        if (c.complete()) {
            d.complete_idx_[j].push_back(static_cast<int>(i));
        } else {
            const int l = c.pre.empty() ? 1 : 0;
            d.incomplete_idx_[2 * j + l].push_back(static_cast<int>(i));
        }
        for (int l = 0; l < 2; ++l) {
            const auto& obs = c.period(l);
            const int cell = 2 * j + l;
            d.n_cell_[cell] += static_cast<long long>(obs.size());
            if (c.complete()) d.n_cell_complete_[cell] += static_cast<long long>(obs.size());
            d.sorted_[cell].insert(d.sorted_[cell].end(), obs.begin(), obs.end());
        }
    }

    for (int j = 0; j < num_groups; ++j) {
        for (int l = 0; l < 2; ++l) {
            if (d.n_cell_[2 * j + l] == 0) throw EmptyCellError(j + 1, l + 1);
            std::sort(d.sorted_[2 * j + l].begin(), d.sorted_[2 * j + l].end());
            d.n_total_ += d.n_cell_[2 * j + l];
        }
    }
    return d;
}

int StudyData::group_clusters(int j) const {
    return complete_clusters(j) + incomplete_clusters(j, 0) + incomplete_clusters(j, 1);
}

StudyData parse_csv(std::istream& in) {
    struct Builder {
        int group;
        std::string id;
        std::map<long long, double> visits[2];
    };
    std::vector<Builder> builders;
    std::map<std::pair<int, std::string>, std::size_t> index;

    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    int max_group = 0;

    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            std::string squashed;
            for (char ch : t)
                if (ch != ' ' && ch != '\t') squashed.push_back(ch);
            if (squashed != kHeader) {
                throw MalformedRowError(lineno, "expected header '" + std::string(kHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string> f = split_fields(t);
        if (f.size() != 5) {
            throw MalformedRowError(lineno, "expected 5 comma-separated fields, found " +
                                                std::to_string(f.size()));
        }
        long long group = parse_int(f[0], lineno, "group");
        if (group < 1) throw MalformedRowError(lineno, "group must be a positive integer");
        if (f[1].empty()) throw MalformedRowError(lineno, "cluster id is empty");
        long long period = parse_int(f[2], lineno, "period");
        if (period != 1 && period != 2) {
            throw MalformedRowError(lineno, "period must be 1 (pre) or 2 (post)");
        }
        long long visit = parse_int(f[3], lineno, "visit");
        double value = parse_real(f[4], lineno);

        auto key = std::make_pair(static_cast<int>(group), f[1]);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, builders.size()).first;
            builders.push_back(Builder{static_cast<int>(group), f[1], {}});
        }
        auto& slot = builders[it->second].visits[period - 1];
        if (slot.count(visit)) {
            throw DuplicateKeyError("group " + f[0] + " cluster '" + f[1] + "' period " + f[2] +
                                    " visit " + f[3] + " appears twice (line " +
                                    std::to_string(lineno) + ")");
        }
        slot.emplace(visit, value);
        max_group = std::max(max_group, static_cast<int>(group));
    }

    if (!header_seen) throw MalformedRowError(0, "input is empty, header row required");
    if (builders.empty()) throw MalformedRowError(lineno, "no data rows found");

    std::vector<bool> seen(static_cast<std::size_t>(max_group) + 1, false);
    for (const Builder& b : builders) seen[static_cast<std::size_t>(b.group)] = true;
    for (int g = 1; g <= max_group; ++g) {
        if (!seen[static_cast<std::size_t>(g)]) {
            throw NonContiguousGroupsError("group labels must be contiguous 1.." +
                                           std::to_string(max_group) + "; group " +
                                           std::to_string(g) + " is missing");
        }
    }

    std::vector<ClusterRecord> records;
    records.reserve(builders.size());
    for (Builder& b : builders) {
        ClusterRecord rec;
        rec.group = b.group;
        rec.id = std::move(b.id);
        for (auto& [v, x] : b.visits[0]) rec.pre.push_back(x);
        for (auto& [v, x] : b.visits[1]) rec.post.push_back(x);
        records.push_back(std::move(rec));
    }
    return StudyData::from_clusters(max_group, std::move(records));
}

StudyData load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return parse_csv(in);
}

std::string to_csv(const StudyData& data) {
    std::ostringstream out;
    out << kHeader << "\n";
    char buf[64];
    for (const ClusterRecord& c : data.clusters()) {
        for (int l = 0; l < 2; ++l) {
            const auto& obs = c.period(l);
            for (std::size_t v = 0; v < obs.size(); ++v) {
                std::snprintf(buf, sizeof(buf), "%.17g", obs[v]);
                out << c.group << ',' << c.id << ',' << (l + 1) << ',' << (v + 1) << ',' << buf
                    << "\n";
            }
        }
    }
    return out.str();
}

void write_csv(const StudyData& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open file for writing: " + path);
    out << to_csv(data);
}

std::vector<std::string> validate(const StudyData& data) {
    std::vector<std::string> warnings;
    constexpr std::size_t kPlausibleClusterSize = 50;
    for (int j = 0; j < data.num_groups(); ++j) {
        if (data.complete_clusters(j) <= 1) {
            warnings.push_back("tau not estimable for group " + std::to_string(j + 1) +
                               " (fewer than 2 complete clusters); contribution set to zero");
        }
        for (int l = 0; l < 2; ++l) {
            if (data.incomplete_clusters(j, l) <= 1) {
                warnings.push_back("eta(" + std::to_string(j + 1) + "," + std::to_string(l + 1) +
                                   ") contribution set to zero (fewer than 2 incomplete clusters)");
            }
        }
    }
    for (const ClusterRecord& c : data.clusters()) {
        for (int l = 0; l < 2; ++l) {
            if (c.period(l).size() > kPlausibleClusterSize) {
                warnings.push_back("cluster '" + c.id + "' has " +
                                   std::to_string(c.period(l).size()) + " observations in period " +
                                   std::to_string(l + 1) + "; cluster sizes above " +
                                   std::to_string(kPlausibleClusterSize) +
                                   " are implausible for this design");
            }
        }
    }
    return warnings;
}

}  // namespace clusterfx
