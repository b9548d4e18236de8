#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace lfm {

// One asserted comparison inside a verification run.
struct CheckRecord {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<long> counts;
    double min_seen = std::numeric_limits<double>::infinity();
    double max_seen = -std::numeric_limits<double>::infinity();
    long total = 0;

    static Histogram make(double lo, double hi, int nbins) {
        Histogram h;
        h.lo = lo;
        h.hi = hi;
        h.counts.assign(static_cast<std::size_t>(nbins), 0);
        return h;
    }

    void add(double v) {
        min_seen = std::min(min_seen, v);
        max_seen = std::max(max_seen, v);
        ++total;
        if (counts.empty()) return;
        double t = (v - lo) / (hi - lo);
        auto n = static_cast<long>(counts.size());
        auto i = static_cast<long>(std::floor(t * n));
        i = std::clamp<long>(i, 0, n - 1);
        ++counts[static_cast<std::size_t>(i)];
    }
};

// Generic verification outcome. `anchor` names the statement being exercised;
// rows without an anchor are plumbing-tagged by the report writer.
struct VerifyReport {
    std::string op;
    std::string anchor;
    bool pass = true;
    long violations = 0;
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, double>> metrics; // insertion-ordered
    std::vector<std::string> notes;
    Histogram margin_hist;

    void check(const std::string& name, bool ok, double value, double bound) {
        checks.push_back(CheckRecord{name, ok, value, bound});
        if (!ok) {
            pass = false;
            ++violations;
        }
    }
    void check_le(const std::string& name, double value, double bound) {
        check(name, value <= bound, value, bound);
    }
    void check_ge(const std::string& name, double value, double bound) {
        check(name, value >= bound, value, bound);
    }
    void metric(const std::string& name, double v) { metrics.emplace_back(name, v); }

    double metric_value(const std::string& name) const {
        for (const auto& [k, v] : metrics)
            if (k == name) return v;
        return std::nan("");
    }
};

} // namespace lfm
