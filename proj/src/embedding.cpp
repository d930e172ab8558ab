#include "geu/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "geu/eigsolve.hpp"
#include "geu/errors.hpp"

namespace geu {

namespace {

constexpr double kPositivityRel = 1e-10;

double positivity_threshold(const Vector& spectrum) {
    const double lambda_max = spectrum.size() ? spectrum[spectrum.size() - 1] : 0.0;
    return kPositivityRel * std::max(1.0, lambda_max);
}

int count_positive(const Vector& spectrum) {
    const double thr = positivity_threshold(spectrum);
    int count = 0;
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
        if (spectrum[i] > thr) ++count;
    }
    return count;
}

void check_uncertainty_shape(const UncertaintyModel& u, Eigen::Index n,
                             Eigen::Index dim, const char* where) {
    if (u.diag_covs.rows() != n || u.diag_covs.cols() != dim) {
        throw ShapeMismatch(std::string(where) + ": uncertainty model is " +
                            std::to_string(u.diag_covs.rows()) + "x" +
                            std::to_string(u.diag_covs.cols()) + ", expected " +
                            std::to_string(n) + "x" + std::to_string(dim));
    }
}

Matrix symmetrized(Matrix m) {
    m = 0.5 * (m + Matrix(m.transpose()));
    return m;
}

}  // namespace

Matrix scatter_from_graph(const Matrix& centered_features, const Matrix& laplacian) {
    if (laplacian.rows() != laplacian.cols() ||
        laplacian.rows() != centered_features.rows()) {
        throw ShapeMismatch("scatter_from_graph: Laplacian is " +
                            std::to_string(laplacian.rows()) + "x" +
                            std::to_string(laplacian.cols()) + " for " +
                            std::to_string(centered_features.rows()) + " samples");
    }
    return symmetrized(centered_features.transpose() * laplacian * centered_features);
}

Matrix uncertainty_regularizer(const UncertaintyModel& u, const Vector& degrees) {
    check_uncertainty_shape(u, degrees.size(), u.diag_covs.cols(),
                            "uncertainty_regularizer");
    const Vector diag = u.diag_covs.transpose() * degrees;
    Matrix reg = Matrix::Zero(diag.size(), diag.size());
    reg.diagonal() = diag;
    return reg;
}

ScatterAssembly assemble_scatters(const Matrix& centered_features,
                                  const GraphPair& graphs,
                                  const std::optional<UncertaintyModel>& u) {
    ScatterAssembly s;
    s.a = scatter_from_graph(centered_features, graphs.laplacian);
    s.b = scatter_from_graph(centered_features, graphs.penalty_laplacian);
    if (u) {
        check_uncertainty_shape(*u, centered_features.rows(), centered_features.cols(),
                                "assemble_scatters");
        s.a += uncertainty_regularizer(*u, graphs.degrees);
        s.b += uncertainty_regularizer(*u, graphs.penalty_degrees);
    }
    return s;
}

EmbeddingModel solve_embedding(const ScatterAssembly& scatters, const Vector& train_mean,
                               Method method, bool geu, double sigma_scale, int d,
                               const FitParams& params) {
    const Eigen::Index dim = scatters.a.rows();
    if (d != kAllPositive && (d < 1 || d > dim)) {
        throw DimensionMismatch("fit: d = " + std::to_string(d) + " outside [1, " +
                                std::to_string(dim) + "]");
    }

    double ridge = 0.0;
    switch (params.ridge.kind) {
        case RidgePolicy::Kind::Auto:
            ridge = auto_ridge(scatters.b);
            break;
        case RidgePolicy::Kind::Absolute:
            ridge = params.ridge.value;
            break;
        case RidgePolicy::Kind::TraceRelative:
            ridge = params.ridge.value * scatters.b.trace() / static_cast<double>(dim);
            break;
    }

    const SymmetricPencil pencil(scatters.a, scatters.b);
    EigenSolution sol;
    if (params.ridge.kind == RidgePolicy::Kind::Auto) {
        // The auto ridge is a numerical floor; escalate until the
        // factorization goes through.
        double r = ridge > 0.0 ? ridge : 1e-12;
        for (int attempt = 0;; ++attempt) {
            try {
                sol = solve_pencil(pencil, r);
                ridge = r;
                break;
            } catch (const NotPositiveDefinite&) {
                if (attempt >= 3) throw;
                r *= 100.0;
            }
        }
    } else {
        sol = solve_pencil(pencil, ridge);
    }

    EmbeddingModel model;
    model.spectrum = sol.eigenvalues;
    model.positive_directions = count_positive(sol.eigenvalues);
    const int want = d == kAllPositive ? model.positive_directions : d;
    if (model.positive_directions < want || want < 1) {
        throw InsufficientPositiveEigenvalues(
            "fit: only " + std::to_string(model.positive_directions) +
            " eigenvalues above the positivity threshold, requested d = " +
            std::to_string(want));
    }
    const double thr = positivity_threshold(sol.eigenvalues);
    model.projection.resize(dim, want);
    int col = 0;
    for (Eigen::Index i = 0; i < sol.eigenvalues.size() && col < want; ++i) {
        if (sol.eigenvalues[i] > thr) {
            model.projection.col(col++) = sol.eigenvectors.col(i);
        }
    }

    model.method_tag = std::string(geu ? "GEU-" : "") +
                       (method == Method::Lda ? "LDA" : "MFA");
    model.train_mean = train_mean;
    model.sigma_scale = sigma_scale;
    model.d = want;
    model.k1 = params.k1;
    model.k2 = params.k2;
    model.ridge = ridge;
    return model;
}

EmbeddingModel fit_with_graphs(const Dataset& x, Method method, const GraphPair& graphs,
                               const std::optional<UncertaintyModel>& u, int d,
                               const FitParams& params) {
    const Eigen::Index n = x.features.rows();
    const Eigen::Index dim = x.features.cols();
    if (d != kAllPositive && (d < 1 || d > dim)) {
        throw DimensionMismatch("fit: d = " + std::to_string(d) + " outside [1, " +
                                std::to_string(dim) + "]");
    }
    if (graphs.laplacian.rows() != n) {
        throw ShapeMismatch("fit: graphs built for " +
                            std::to_string(graphs.laplacian.rows()) + " samples, data has " +
                            std::to_string(n));
    }
    if (u) check_uncertainty_shape(*u, n, dim, "fit");

    const Vector mean = x.features.colwise().mean();
    const Matrix centered = x.features.rowwise() - mean.transpose();
    const ScatterAssembly scatters = assemble_scatters(centered, graphs, u);
    return solve_embedding(scatters, mean, method, u.has_value(),
                           u ? u->sigma_scale : 0.0, d, params);
}

EmbeddingModel fit(const Dataset& x, Method method,
                   const std::optional<UncertaintyModel>& u, int d,
                   const FitParams& params) {
    const GraphPair graphs = method == Method::Lda
                                 ? lda_graphs(x.labels)
                                 : mfa_graphs(x, params.k1, params.k2);
    return fit_with_graphs(x, method, graphs, u, d, params);
}

EmbeddingModel truncate(const EmbeddingModel& model, int d) {
    if (d < 1 || d > model.d) {
        throw DimensionMismatch("truncate: d = " + std::to_string(d) +
                                " outside [1, " + std::to_string(model.d) + "]");
    }
    EmbeddingModel out = model;
    out.projection = model.projection.leftCols(d);
    out.d = d;
    return out;
}

Matrix project(const EmbeddingModel& model, const Dataset& x) {
    if (x.features.cols() != model.train_mean.size()) {
        throw DimensionMismatch("project: data has " + std::to_string(x.features.cols()) +
                                " features, model expects " +
                                std::to_string(model.train_mean.size()));
    }
    return (x.features.rowwise() - model.train_mean.transpose()) * model.projection;
}

std::pair<Matrix, Matrix> project_with_variance(const EmbeddingModel& model,
                                                const Dataset& x,
                                                const UncertaintyModel& u) {
    check_uncertainty_shape(u, x.features.rows(), x.features.cols(),
                            "project_with_variance");
    Matrix means = project(model, x);
    const Matrix v_sq = model.projection.array().square();
    Matrix vars = u.diag_covs * v_sq;  // (i,k) = sum_j V(j,k)^2 cov(i,j)
    return {std::move(means), std::move(vars)};
}

Matrix augmentation_scatter_oracle(const Dataset& x, const UncertaintyModel& u,
                                   const Matrix& laplacian, const Vector& degrees,
                                   int samples_per_point, std::uint64_t seed) {
    const Eigen::Index n = x.features.rows();
    const Eigen::Index dim = x.features.cols();
    if (samples_per_point < 1) {
        throw DataError("augmentation_scatter_oracle: samples_per_point must be >= 1");
    }
    check_uncertainty_shape(u, n, dim, "augmentation_scatter_oracle");
    if (laplacian.rows() != n || laplacian.cols() != n || degrees.size() != n) {
        throw ShapeMismatch("augmentation_scatter_oracle: graph shapes disagree");
    }

    const Matrix weights = Matrix(degrees.asDiagonal()) - laplacian;  // W = D - L
    const auto m = static_cast<double>(samples_per_point);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    // Sufficient statistics per parent: replicate second moments and means.
    // The pairwise sum over replicate pairs factors through these exactly.
    Matrix second_moments = Matrix::Zero(dim, dim);  // sum_i degrees[i] * G_i
    Matrix rep_means(n, dim);
    Vector rep(dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        Matrix g = Matrix::Zero(dim, dim);
        Vector mean_acc = Vector::Zero(dim);
        for (int r = 0; r < samples_per_point; ++r) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                rep[j] = x.features(i, j) + std::sqrt(u.diag_covs(i, j)) * gauss(rng);
            }
            g.noalias() += rep * rep.transpose();
            mean_acc += rep;
        }
        second_moments.noalias() += (degrees[i] / m) * g;
        rep_means.row(i) = mean_acc.transpose() / m;
    }

    Matrix cross = rep_means.transpose() * weights * rep_means;
    return symmetrized(second_moments - cross);
}

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    out << model.method_tag << " " << model.input_dim() << " " << model.d << " ";
    put(model.sigma_scale);
    out << " ";
    put(model.ridge);
    out << "\n";
    for (int c = 0; c < model.d; ++c) {
        for (int r = 0; r < model.input_dim(); ++r) {
            if (r) out << " ";
            put(model.projection(r, c));
        }
        out << "\n";
    }
    for (int r = 0; r < model.input_dim(); ++r) {
        if (r) out << " ";
        put(model.train_mean[r]);
    }
    out << "\n";
    for (Eigen::Index i = 0; i < model.spectrum.size(); ++i) {
        if (i) out << " ";
        put(model.spectrum[i]);
    }
    out << "\n";
}

EmbeddingModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    EmbeddingModel model;
    int dim = 0;
    std::string header;
    if (!std::getline(in, header)) throw ParseError(path + ": empty model file");
    {
        std::stringstream ss(header);
        if (!(ss >> model.method_tag >> dim >> model.d >> model.sigma_scale >>
              model.ridge)) {
            throw ParseError(path + ": bad model header '" + header + "'");
        }
    }
    if (dim < 1 || model.d < 1 || model.d > dim) {
        throw ParseError(path + ": inconsistent model dimensions");
    }
    model.projection.resize(dim, model.d);
    for (int c = 0; c < model.d; ++c) {
        for (int r = 0; r < dim; ++r) {
            if (!(in >> model.projection(r, c))) {
                throw ParseError(path + ": truncated projection data");
            }
        }
    }
    model.train_mean.resize(dim);
    for (int r = 0; r < dim; ++r) {
        if (!(in >> model.train_mean[r])) {
            throw ParseError(path + ": truncated train mean");
        }
    }
    std::vector<double> spec;
    double v;
    while (in >> v) spec.push_back(v);
    if (spec.empty()) throw ParseError(path + ": missing spectrum");
    model.spectrum.resize(static_cast<Eigen::Index>(spec.size()));
    for (size_t i = 0; i < spec.size(); ++i) {
        model.spectrum[static_cast<Eigen::Index>(i)] = spec[i];
    }
    model.positive_directions = count_positive(model.spectrum);
    return model;
}

}  // namespace geu
