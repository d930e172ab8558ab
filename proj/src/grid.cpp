#include "geu/grid.hpp"

#include <cstdio>
#include <fstream>

#include "geu/errors.hpp"

namespace geu {

DecisionGrid decision_grid(const EmbeddingModel& model, const KnnModel& knn,
                           const GridBounds& bounds, int resolution) {
    if (model.input_dim() != 2) {
        throw NotTwoDimensional("decision_grid: model input dimension is " +
                                std::to_string(model.input_dim()));
    }
    if (resolution < 2) throw DataError("decision_grid: resolution must be >= 2");

    DecisionGrid grid;
    grid.bounds = bounds;
    grid.resolution = resolution;
    grid.xs.resize(static_cast<size_t>(resolution));
    grid.ys.resize(static_cast<size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double t = static_cast<double>(i) / (resolution - 1);
        grid.xs[static_cast<size_t>(i)] = bounds.xmin + t * (bounds.xmax - bounds.xmin);
        grid.ys[static_cast<size_t>(i)] = bounds.ymin + t * (bounds.ymax - bounds.ymin);
    }

    Dataset points;
    points.features.resize(static_cast<Eigen::Index>(resolution) * resolution, 2);
    for (int iy = 0; iy < resolution; ++iy) {
        for (int ix = 0; ix < resolution; ++ix) {
            const Eigen::Index row = static_cast<Eigen::Index>(iy) * resolution + ix;
            points.features(row, 0) = grid.xs[static_cast<size_t>(ix)];
            points.features(row, 1) = grid.ys[static_cast<size_t>(iy)];
        }
    }
    grid.labels = knn_predict(knn, project(model, points));
    return grid;
}

void save_grid_csv(const DecisionGrid& grid, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << "x,y,label\n";
    char buf[64];
    for (int iy = 0; iy < grid.resolution; ++iy) {
        for (int ix = 0; ix < grid.resolution; ++ix) {
            std::snprintf(buf, sizeof(buf), "%.10g,%.10g",
                          grid.xs[static_cast<size_t>(ix)],
                          grid.ys[static_cast<size_t>(iy)]);
            out << buf << ","
                << grid.labels[static_cast<size_t>(iy) * static_cast<size_t>(grid.resolution) +
                               static_cast<size_t>(ix)]
                << "\n";
        }
    }
}

double grid_agreement(const DecisionGrid& a, const DecisionGrid& b) {
    if (a.labels.size() != b.labels.size() || a.labels.empty()) {
        throw LengthMismatch("grid_agreement: grids differ in size");
    }
    size_t same = 0;
    for (size_t i = 0; i < a.labels.size(); ++i) {
        if (a.labels[i] == b.labels[i]) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(a.labels.size());
}

}  // namespace geu
