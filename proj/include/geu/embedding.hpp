#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "geu/data.hpp"
#include "geu/graph.hpp"
#include "geu/uncertainty.hpp"

namespace geu {

enum class Method { Lda, Mfa };

struct RidgePolicy {
    enum class Kind { Auto, Absolute, TraceRelative };
    Kind kind = Kind::Auto;
    double value = 0.0;

    // 1e-8 * trace(b)/D, escalated automatically if factorization fails.
    static RidgePolicy automatic() { return {}; }
    static RidgePolicy absolute(double v) { return {Kind::Absolute, v}; }
    // value * trace(b)/D, the RLDA grid parameterization.
    static RidgePolicy trace_relative(double mult) { return {Kind::TraceRelative, mult}; }
};

struct FitParams {
    int k1 = 5;
    int k2 = 20;
    RidgePolicy ridge = RidgePolicy::automatic();
};

struct EmbeddingModel {
    Matrix projection;       // D x d, columns ordered by ascending eigenvalue
    Vector spectrum;         // all eigenvalues, ascending
    std::string method_tag;  // LDA, MFA, GEU-LDA or GEU-MFA
    Vector train_mean;
    double sigma_scale = 0.0;
    int d = 0;
    int k1 = 0;
    int k2 = 0;
    double ridge = 0.0;           // effective absolute ridge used by the solve
    int positive_directions = 0;  // eigenvalues above the positivity threshold

    int input_dim() const { return static_cast<int>(train_mean.size()); }
};

// X L X^T with X the column-stacked centered samples; callers pass the
// centered N x D feature matrix.
Matrix scatter_from_graph(const Matrix& centered_features, const Matrix& laplacian);

// Diagonal D x D matrix with entry (j,j) = sum_i degrees[i] * diag_covs(i,j).
Matrix uncertainty_regularizer(const UncertaintyModel& u, const Vector& degrees);

// Minimized side a = X L X^T + sum_i D_ii Sigma_i and constraint side
// b = X L^p X^T + sum_i D^p_ii Sigma_i of the generalized eigenproblem.
struct ScatterAssembly {
    Matrix a;
    Matrix b;
};

ScatterAssembly assemble_scatters(const Matrix& centered_features,
                                  const GraphPair& graphs,
                                  const std::optional<UncertaintyModel>& u);

// Passing kAllPositive keeps every direction above the positivity threshold.
inline constexpr int kAllPositive = -1;

// Low-level entry: solve a preassembled pencil. The experiment harness uses
// this to share one ScatterAssembly base across the sigma grid; it is also
// the hook for callers with non-diagonal uncertainty aggregates.
EmbeddingModel solve_embedding(const ScatterAssembly& scatters, const Vector& train_mean,
                               Method method, bool geu, double sigma_scale, int d,
                               const FitParams& params = {});

EmbeddingModel fit(const Dataset& x, Method method,
                   const std::optional<UncertaintyModel>& u, int d,
                   const FitParams& params = {});

// Same as fit but with the graphs already built on x; lets the experiment
// harness reuse one GraphPair across the whole sigma grid.
EmbeddingModel fit_with_graphs(const Dataset& x, Method method, const GraphPair& graphs,
                               const std::optional<UncertaintyModel>& u, int d,
                               const FitParams& params = {});

// First d columns of a wider model, unchanged otherwise.
EmbeddingModel truncate(const EmbeddingModel& model, int d);

// y_i = V^T (x_i - train_mean), one row per sample.
Matrix project(const EmbeddingModel& model, const Dataset& x);

// Projected means plus per-direction variances v^T Sigma_i v.
std::pair<Matrix, Matrix> project_with_variance(const EmbeddingModel& model,
                                                const Dataset& x,
                                                const UncertaintyModel& u);

// Empirical intrinsic scatter of an augmented set with samples_per_point
// Gaussian replicates per sample, replicate pairs weighted W_ij / M^2.
// Converges to scatter_from_graph + uncertainty_regularizer as M grows.
Matrix augmentation_scatter_oracle(const Dataset& x, const UncertaintyModel& u,
                                   const Matrix& laplacian, const Vector& degrees,
                                   int samples_per_point, std::uint64_t seed);

void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path);

}  // namespace geu
