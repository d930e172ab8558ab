#include "geu/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "geu/errors.hpp"

namespace geu {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

bool parse_long(const std::string& s, long& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

struct CsvRecord {
    std::vector<std::string> cells;
    int line;  // 1-based line where the record starts
};

// RFC-4180-style tokenizer: quoted cells may contain the delimiter, doubled
// quotes and newlines.
std::vector<CsvRecord> parse_csv(const std::string& text, char delim,
                                 const std::string& path) {
    std::vector<CsvRecord> records;
    std::vector<std::string> cells;
    std::string cell;
    bool in_quotes = false;
    bool cell_started = false;
    int line = 1;
    int record_line = 1;

    auto end_cell = [&]() {
        cells.push_back(cell);
        cell.clear();
        cell_started = false;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line;
                cell += ch;
            }
        } else if (ch == '"' && trim(cell).empty()) {
            in_quotes = true;
            cell_started = true;
            cell.clear();
        } else if (ch == delim) {
            end_cell();
        } else if (ch == '\n') {
            const bool blank = cells.empty() && trim(cell).empty() && !cell_started;
            if (!blank) {
                end_cell();
                records.push_back({cells, record_line});
                cells.clear();
            }
            cell.clear();
            cell_started = false;
            ++line;
            record_line = line;
        } else {
            if (ch != '\r') cell_started = true;
            cell += ch;
        }
    }
    if (in_quotes) throw ParseError(path + ": unterminated quote at end of file");
    const bool blank = cells.empty() && trim(cell).empty() && !cell_started;
    if (!blank) {
        end_cell();
        records.push_back({cells, record_line});
    }
    return records;
}

// Resolves a column reference (header name or 0-based index) to an index.
int resolve_column(const std::string& ref, const std::vector<std::string>& header,
                   size_t ncols) {
    for (size_t j = 0; j < header.size(); ++j) {
        if (header[j] == ref) return static_cast<int>(j);
    }
    long idx = -1;
    if (parse_long(trim(ref), idx) && idx >= 0 && idx < static_cast<long>(ncols)) {
        return static_cast<int>(idx);
    }
    return -1;
}

}  // namespace

std::vector<int> Dataset::class_counts() const {
    std::vector<int> counts(num_classes(), 0);
    for (int c : labels) counts[c]++;
    return counts;
}

Dataset Dataset::subset(const std::vector<int>& row_indices) const {
    Dataset out;
    out.features.resize(static_cast<Eigen::Index>(row_indices.size()), features.cols());
    out.labels.reserve(row_indices.size());
    for (size_t r = 0; r < row_indices.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(row_indices[r]);
        out.labels.push_back(labels[row_indices[r]]);
    }
    out.feature_names = feature_names;
    out.class_names = class_names;
    return out;
}

Dataset load_csv(const std::string& path, const LoadOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    auto records = parse_csv(buf.str(), opts.delimiter, path);
    if (records.empty()) throw ParseError(path + ": empty file");

    std::vector<std::string> header;
    size_t first_data = 0;
    if (opts.has_header) {
        for (const auto& c : records[0].cells) header.push_back(trim(c));
        first_data = 1;
    }
    if (records.size() - first_data < 2) {
        throw ParseError(path + ": need at least 2 data rows");
    }
    const size_t ncols = records[first_data].cells.size();

    const int label_col = resolve_column(opts.label_column, header, ncols);
    if (label_col < 0) {
        throw MissingLabelColumn(path + ": label column '" + opts.label_column +
                                 "' not found");
    }
    std::set<int> dropped{label_col};
    for (const auto& ref : opts.drop_columns) {
        const int c = resolve_column(ref, header, ncols);
        if (c < 0) throw DataError(path + ": drop column '" + ref + "' not found");
        dropped.insert(c);
    }

    std::vector<int> feature_cols;
    for (size_t j = 0; j < ncols; ++j) {
        if (!dropped.count(static_cast<int>(j))) feature_cols.push_back(static_cast<int>(j));
    }
    if (feature_cols.empty()) throw ParseError(path + ": no feature columns left");

    const size_t nrows = records.size() - first_data;
    Dataset ds;
    ds.features.resize(static_cast<Eigen::Index>(nrows),
                       static_cast<Eigen::Index>(feature_cols.size()));
    std::vector<std::string> raw_labels(nrows);

    for (size_t r = 0; r < nrows; ++r) {
        const auto& rec = records[first_data + r];
        if (rec.cells.size() != ncols) {
            throw ParseError(path + ": line " + std::to_string(rec.line) + ": expected " +
                             std::to_string(ncols) + " cells, got " +
                             std::to_string(rec.cells.size()));
        }
        for (size_t j = 0; j < ncols; ++j) {
            if (trim(rec.cells[j]).empty()) {
                throw ParseError(path + ": line " + std::to_string(rec.line) +
                                 ": missing value in column " + std::to_string(j));
            }
        }
        raw_labels[r] = trim(rec.cells[static_cast<size_t>(label_col)]);
        for (size_t f = 0; f < feature_cols.size(); ++f) {
            const std::string cell = trim(rec.cells[static_cast<size_t>(feature_cols[f])]);
            double v = 0.0;
            if (!parse_double(cell, v)) {
                const std::string col_name =
                    static_cast<size_t>(feature_cols[f]) < header.size()
                        ? header[static_cast<size_t>(feature_cols[f])]
                        : std::to_string(feature_cols[f]);
                throw NonNumericFeature(path + ": line " + std::to_string(rec.line) +
                                        ", column '" + col_name + "': non-numeric value '" +
                                        cell + "'");
            }
            ds.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)) = v;
        }
    }

    // Contiguous class ids: sort distinct labels, numerically when possible.
    std::vector<std::string> uniq(raw_labels);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    const bool all_numeric = std::all_of(uniq.begin(), uniq.end(), [](const std::string& s) {
        long v;
        return parse_long(s, v);
    });
    if (all_numeric) {
        std::sort(uniq.begin(), uniq.end(), [](const std::string& a, const std::string& b) {
            long va, vb;
            parse_long(a, va);
            parse_long(b, vb);
            return va < vb;
        });
    }
    std::map<std::string, int> label_id;
    for (size_t i = 0; i < uniq.size(); ++i) label_id[uniq[i]] = static_cast<int>(i);
    ds.labels.reserve(nrows);
    for (const auto& s : raw_labels) ds.labels.push_back(label_id[s]);
    ds.class_names = uniq;

    for (int c : feature_cols) {
        ds.feature_names.push_back(static_cast<size_t>(c) < header.size()
                                       ? header[static_cast<size_t>(c)]
                                       : "f" + std::to_string(c));
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    char buf[64];
    for (int j = 0; j < ds.dim(); ++j) {
        const std::string name = static_cast<size_t>(j) < ds.feature_names.size()
                                     ? ds.feature_names[static_cast<size_t>(j)]
                                     : "f" + std::to_string(j);
        out << name << delimiter;
    }
    out << "label\n";
    for (int i = 0; i < ds.n(); ++i) {
        for (int j = 0; j < ds.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
            out << buf << delimiter;
        }
        out << ds.class_names[static_cast<size_t>(ds.labels[static_cast<size_t>(i)])]
            << "\n";
    }
}

ZScoreStats zscore_fit(const Dataset& train) {
    if (train.n() < 1) throw DataError("zscore_fit: empty dataset");
    ZScoreStats stats;
    stats.mean = train.features.colwise().mean();
    stats.stddev.resize(train.dim());
    for (int j = 0; j < train.dim(); ++j) {
        const double var =
            (train.features.col(j).array() - stats.mean[j]).square().mean();
        const double sd = std::sqrt(var);
        stats.stddev[j] = sd;
    }
    return stats;
}

Dataset zscore_apply(const Dataset& d, const ZScoreStats& stats) {
    if (d.dim() != stats.mean.size()) {
        throw ShapeMismatch("zscore_apply: feature dimension mismatch");
    }
    Dataset out = d;
    for (int j = 0; j < d.dim(); ++j) {
        // Effectively constant features pass through untouched.
        if (stats.stddev[j] <= 1e-12 * (std::abs(stats.mean[j]) + 1.0)) continue;
        out.features.col(j) =
            (d.features.col(j).array() - stats.mean[j]) / stats.stddev[j];
    }
    return out;
}

Dataset add_noise(const Dataset& x, double level, std::uint64_t seed) {
    if (level < 0.0) throw DataError("noise level must be nonnegative");
    Dataset out = x;
    if (level == 0.0) return out;

    Vector sd(x.dim());
    for (int j = 0; j < x.dim(); ++j) {
        const double mean = x.features.col(j).mean();
        sd[j] = std::sqrt((x.features.col(j).array() - mean).square().mean());
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < x.n(); ++i) {
        for (int j = 0; j < x.dim(); ++j) {
            out.features(i, j) += level * sd[j] * gauss(rng);
        }
    }
    return out;
}

std::vector<int> FoldSplit::fold_indices(int fold) const {
    std::vector<int> out;
    for (size_t i = 0; i < fold_assignments.size(); ++i) {
        if (fold_assignments[i] == fold) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::vector<int> FoldSplit::complement_indices(int fold) const {
    std::vector<int> out;
    for (size_t i = 0; i < fold_assignments.size(); ++i) {
        if (fold_assignments[i] != fold) out.push_back(static_cast<int>(i));
    }
    return out;
}

int FoldSplit::num_folds() const {
    return fold_assignments.empty()
               ? 0
               : *std::max_element(fold_assignments.begin(), fold_assignments.end()) + 1;
}

FoldSplit kfold(const Dataset& x, int k, std::uint64_t seed, bool stratified) {
    if (k < 2) throw DataError("kfold: k must be >= 2");
    if (k > x.n()) throw DataError("kfold: k exceeds sample count");

    std::mt19937_64 rng(seed);
    FoldSplit split;
    split.seed = seed;
    split.fold_assignments.assign(static_cast<size_t>(x.n()), 0);

    if (!stratified) {
        std::vector<int> order(static_cast<size_t>(x.n()));
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t pos = 0; pos < order.size(); ++pos) {
            split.fold_assignments[static_cast<size_t>(order[pos])] =
                static_cast<int>(pos % static_cast<size_t>(k));
        }
        return split;
    }

    const auto counts = x.class_counts();
    for (size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0 && counts[c] < k) {
            throw ClassTooSmall("kfold: class " + std::to_string(c) + " has " +
                                std::to_string(counts[c]) + " members, need >= " +
                                std::to_string(k) + " for stratified folds");
        }
    }
    // Per-class round robin with a rolling start offset keeps global fold
    // sizes within 1 of each other.
    int start = 0;
    for (int c = 0; c < x.num_classes(); ++c) {
        std::vector<int> members;
        for (int i = 0; i < x.n(); ++i) {
            if (x.labels[static_cast<size_t>(i)] == c) members.push_back(i);
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (size_t pos = 0; pos < members.size(); ++pos) {
            split.fold_assignments[static_cast<size_t>(members[pos])] =
                static_cast<int>((start + pos) % static_cast<size_t>(k));
        }
        start = (start + static_cast<int>(members.size() % static_cast<size_t>(k))) % k;
    }
    return split;
}

Dataset synthetic_two_class(int n_per_class, double separation, double spread,
                            std::uint64_t seed) {
    if (n_per_class < 2) throw DataError("synthetic_two_class: n_per_class must be >= 2");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset ds;
    ds.features.resize(2 * n_per_class, 2);
    ds.labels.reserve(static_cast<size_t>(2 * n_per_class));
    for (int c = 0; c < 2; ++c) {
        const double cx = (c == 0 ? -0.5 : 0.5) * separation;
        for (int i = 0; i < n_per_class; ++i) {
            const int row = c * n_per_class + i;
            ds.features(row, 0) = cx + spread * gauss(rng);
            ds.features(row, 1) = spread * gauss(rng);
            ds.labels.push_back(c);
        }
    }
    ds.feature_names = {"x", "y"};
    ds.class_names = {"0", "1"};
    return ds;
}

std::vector<int> stratified_subsample(const Dataset& x, int size, std::uint64_t seed) {
    const int C = x.num_classes();
    if (size > x.n()) {
        throw SizeTooLarge("subsample size " + std::to_string(size) + " exceeds pool " +
                           std::to_string(x.n()));
    }
    if (size < C) {
        throw SizeTooLarge("subsample size " + std::to_string(size) +
                           " below class count " + std::to_string(C) +
                           " (need at least one sample per class)");
    }
    const auto counts = x.class_counts();
    const double total = static_cast<double>(x.n());

    // Proportional allocation, at least one per class, exact total.
    std::vector<int> alloc(static_cast<size_t>(C));
    int assigned = 0;
    for (int c = 0; c < C; ++c) {
        alloc[static_cast<size_t>(c)] = std::max(
            1, std::min(counts[static_cast<size_t>(c)],
                        static_cast<int>(size * counts[static_cast<size_t>(c)] / total)));
        assigned += alloc[static_cast<size_t>(c)];
    }
    while (assigned != size) {
        int best = -1;
        double best_gap = -1e300;
        for (int c = 0; c < C; ++c) {
            const double quota = size * counts[static_cast<size_t>(c)] / total;
            const double gap = quota - alloc[static_cast<size_t>(c)];
            if (assigned < size) {
                if (alloc[static_cast<size_t>(c)] < counts[static_cast<size_t>(c)] &&
                    gap > best_gap) {
                    best_gap = gap;
                    best = c;
                }
            } else {
                if (alloc[static_cast<size_t>(c)] > 1 && -gap > best_gap) {
                    best_gap = -gap;
                    best = c;
                }
            }
        }
        if (best < 0) throw SizeTooLarge("cannot satisfy stratified allocation");
        alloc[static_cast<size_t>(best)] += (assigned < size) ? 1 : -1;
        assigned += (assigned < size) ? 1 : -1;
    }

    std::mt19937_64 rng(seed);
    std::vector<int> picked;
    picked.reserve(static_cast<size_t>(size));
    for (int c = 0; c < C; ++c) {
        std::vector<int> members;
        for (int i = 0; i < x.n(); ++i) {
            if (x.labels[static_cast<size_t>(i)] == c) members.push_back(i);
        }
        std::shuffle(members.begin(), members.end(), rng);
        members.resize(static_cast<size_t>(alloc[static_cast<size_t>(c)]));
        picked.insert(picked.end(), members.begin(), members.end());
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace geu
