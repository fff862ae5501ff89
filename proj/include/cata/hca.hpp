#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cata {

// Agglomerative clustering result. Leaves are clusters 0..n-1; merge i
// creates cluster n+i. Heights are the Ward SSE increase of each merge.
struct Dendrogram {
    struct Merge {
        Eigen::Index a = 0, b = 0;  // cluster ids, a < b
        double height = 0.0;
    };
    std::vector<std::string> leaf_labels;
    std::vector<Merge> merges;
    std::string linkage = "ward";

    std::size_t n_leaves() const { return leaf_labels.size(); }
};

// Ward minimum-variance agglomeration on Euclidean coordinates. Ties are
// broken by the lexicographically smallest (a, b) cluster-id pair.
Dendrogram fit_hca(const Eigen::MatrixXd& points, std::vector<std::string> labels = {});

// Undo the last k-1 merges; labels numbered by order of first leaf
// appearance, so label 0 always contains leaf 0.
std::vector<int> cut_tree(const Dendrogram& tree, std::size_t k);

// Heights of the last merges, largest first, to eyeball an elbow.
std::vector<double> merge_height_drops(const Dendrogram& tree);

void save_dendrogram(const Dendrogram& tree, const std::string& path);
Dendrogram load_dendrogram(const std::string& path);

}  // namespace cata
