#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "geu/errors.hpp"
#include "geu/experiment.hpp"

namespace geu {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Mean of per-repeat means and their population variance.
std::pair<double, double> repeat_stats(const std::vector<FoldOutcome>& raw) {
    std::map<int, std::pair<double, int>> per_repeat;
    for (const auto& e : raw) {
        per_repeat[e.repeat].first += e.accuracy;
        per_repeat[e.repeat].second += 1;
    }
    if (per_repeat.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (const auto& [r, acc] : per_repeat) mean += acc.first / acc.second;
    mean /= static_cast<double>(per_repeat.size());
    double var = 0.0;
    for (const auto& [r, acc] : per_repeat) {
        const double m = acc.first / acc.second;
        var += (m - mean) * (m - mean);
    }
    var /= static_cast<double>(per_repeat.size());
    return {mean, var};
}

}  // namespace

void ReportCell::finalize() {
    const auto [m, v] = repeat_stats(raw);
    mean = m;
    variance = v;
}

const ReportCell* ExperimentReport::find(const std::string& method, double axis) const {
    for (const auto& cell : cells) {
        if (cell.method == method && cell.axis == axis) return &cell;
    }
    return nullptr;
}

void ExperimentReport::write(const std::string& out_dir) const {
    std::filesystem::create_directories(out_dir);

    for (const auto& cell : cells) {
        const auto [m, v] = repeat_stats(cell.raw);
        if (m != cell.mean || v != cell.variance) {
            throw NumericalError("report cell (" + cell.method + ", " +
                                 fmt(cell.axis, "%g") +
                                 "): stored mean/variance do not match raw entries");
        }
    }

    {
        std::ofstream raw(out_dir + "/report_raw.csv", std::ios::binary);
        if (!raw) throw DataError("cannot write " + out_dir + "/report_raw.csv");
        raw << "method," << axis_name << ",repeat,fold,accuracy,sigma,d,k,ridge\n";
        for (const auto& cell : cells) {
            for (const auto& e : cell.raw) {
                raw << cell.method << "," << fmt(cell.axis, "%g") << "," << e.repeat << ","
                    << e.fold << "," << fmt(e.accuracy) << "," << fmt(e.sigma, "%g") << ","
                    << e.d << "," << e.k << "," << fmt(e.ridge) << "\n";
            }
        }
    }

    {
        std::ofstream sum(out_dir + "/report.csv", std::ios::binary);
        if (!sum) throw DataError("cannot write " + out_dir + "/report.csv");
        sum << "method," << axis_name << ",mean_accuracy,accuracy_variance,entries,status\n";
        for (const auto& cell : cells) {
            std::string status = cell.failed ? "FAILED: " + cell.error : "ok";
            std::replace(status.begin(), status.end(), ',', ';');
            std::replace(status.begin(), status.end(), '\n', ' ');
            sum << cell.method << "," << fmt(cell.axis, "%g") << "," << fmt(cell.mean) << ","
                << fmt(cell.variance) << "," << cell.raw.size() << "," << status << "\n";
        }
    }

    {
        std::vector<std::string> methods;
        std::vector<double> axes;
        for (const auto& cell : cells) {
            if (std::find(methods.begin(), methods.end(), cell.method) == methods.end()) {
                methods.push_back(cell.method);
            }
            if (std::find(axes.begin(), axes.end(), cell.axis) == axes.end()) {
                axes.push_back(cell.axis);
            }
        }
        std::ofstream md(out_dir + "/report.md", std::ios::binary);
        if (!md) throw DataError("cannot write " + out_dir + "/report.md");
        md << "| " << axis_name << " |";
        for (const auto& m : methods) md << " " << m << " |";
        md << "\n|---|";
        for (size_t i = 0; i < methods.size(); ++i) md << "---|";
        md << "\n";
        for (double axis : axes) {
            md << "| " << fmt(axis, "%g") << " |";
            for (const auto& m : methods) {
                const ReportCell* cell = find(m, axis);
                if (!cell) {
                    md << " - |";
                } else if (cell->failed) {
                    md << " FAILED |";
                } else {
                    md << " " << fmt(cell->mean, "%.3f") << " |";
                }
            }
            md << "\n";
        }
    }

    {
        std::ofstream tm(out_dir + "/timings.csv", std::ios::binary);
        if (!tm) throw DataError("cannot write " + out_dir + "/timings.csv");
        tm << "method," << axis_name << ",wall_seconds\n";
        for (const auto& cell : cells) {
            tm << cell.method << "," << fmt(cell.axis, "%g") << ","
               << fmt(cell.wall_seconds, "%.3f") << "\n";
        }
    }
}

}  // namespace geu
