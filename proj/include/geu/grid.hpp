#pragma once

#include <string>
#include <vector>

#include "geu/classify.hpp"
#include "geu/embedding.hpp"

namespace geu {

struct GridBounds {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
};

struct DecisionGrid {
    GridBounds bounds;
    int resolution = 0;
    std::vector<double> xs;  // resolution values each
    std::vector<double> ys;
    Labels labels;  // row-major, index = iy * resolution + ix
};

// Lattice of k-NN predictions over a 2-D input domain; the model projects
// each grid point before classification.
DecisionGrid decision_grid(const EmbeddingModel& model, const KnnModel& knn,
                           const GridBounds& bounds, int resolution);

// x,y,label rows for external plotting.
void save_grid_csv(const DecisionGrid& grid, const std::string& path);

double grid_agreement(const DecisionGrid& a, const DecisionGrid& b);

}  // namespace geu
