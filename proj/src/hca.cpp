#include "cata/hca.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "cata/errors.hpp"
#include "cata/serialize.hpp"

namespace cata {

Dendrogram fit_hca(const Eigen::MatrixXd& points, std::vector<std::string> labels) {
    if (!points.allFinite()) throw NonFiniteInput("fit_hca: non-finite coordinates");
    const Eigen::Index n = points.rows();
    if (n < 1) throw NonFiniteInput("fit_hca: need at least one point");
    Dendrogram tree;
    if (labels.empty())
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    tree.leaf_labels = std::move(labels);

    struct Cluster {
        Eigen::Index id;
        double size;
        Eigen::RowVectorXd centroid;
        bool active = true;
    };
    std::vector<Cluster> clusters;
    for (Eigen::Index i = 0; i < n; ++i)
        clusters.push_back({i, 1.0, points.row(i), true});

    for (Eigen::Index step = 0; step < n - 1; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            if (!clusters[i].active) continue;
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                if (!clusters[j].active) continue;
                const double na = clusters[i].size, nb = clusters[j].size;
                const double delta = na * nb / (na + nb) *
                                     (clusters[i].centroid - clusters[j].centroid).squaredNorm();
                // strict < keeps the lexicographically smallest (a,b) on ties
                if (delta < best) {
                    best = delta;
                    bi = i;
                    bj = j;
                }
            }
        }
        Cluster merged;
        merged.id = n + step;
        merged.size = clusters[bi].size + clusters[bj].size;
        merged.centroid = (clusters[bi].size * clusters[bi].centroid +
                           clusters[bj].size * clusters[bj].centroid) /
                          merged.size;
        tree.merges.push_back({clusters[bi].id, clusters[bj].id, best});
        clusters[bi].active = false;
        clusters[bj].active = false;
        clusters.push_back(std::move(merged));
    }
    return tree;
}

std::vector<int> cut_tree(const Dendrogram& tree, std::size_t k) {
    const std::size_t n = tree.n_leaves();
    if (k < 1 || k > n) throw InvalidK("cut_tree: k must be in [1, n]");

    // union-find over the first n-k merges
    std::vector<std::size_t> parent(2 * n - 1);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t m = 0; m + k < n; ++m) {
        const auto& mg = tree.merges[m];
        std::size_t target = n + m;
        parent[find(static_cast<std::size_t>(mg.a))] = target;
        parent[find(static_cast<std::size_t>(mg.b))] = target;
    }

    std::vector<int> labels(n, -1);
    std::vector<std::size_t> roots;
    for (std::size_t leaf = 0; leaf < n; ++leaf) {
        std::size_t root = find(leaf);
        std::size_t li = 0;
        for (; li < roots.size(); ++li)
            if (roots[li] == root) break;
        if (li == roots.size()) roots.push_back(root);
        labels[leaf] = static_cast<int>(li);
    }
    return labels;
}

std::vector<double> merge_height_drops(const Dendrogram& tree) {
    std::vector<double> heights;
    for (auto it = tree.merges.rbegin(); it != tree.merges.rend(); ++it)
        heights.push_back(it->height);
    return heights;
}

void save_dendrogram(const Dendrogram& tree, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for write: " + path);
    os << "cata-dendrogram v1\n";
    os << "linkage " << tree.linkage << "\n";
    os << "leaves " << tree.n_leaves() << "\n";
    for (const auto& l : tree.leaf_labels) os << l << "\n";
    os << "merges " << tree.merges.size() << "\n";
    for (const auto& m : tree.merges)
        os << m.a << "\t" << m.b << "\t" << format_double(m.height) << "\n";
}

Dendrogram load_dendrogram(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open for read: " + path);
    std::string line;
    std::getline(is, line);
    if (line != "cata-dendrogram v1") throw Error("not a dendrogram file: " + path);
    Dendrogram tree;
    std::string word;
    std::size_t count;
    is >> word >> tree.linkage;
    is >> word >> count;
    std::getline(is, line);
    for (std::size_t i = 0; i < count; ++i) {
        std::getline(is, line);
        tree.leaf_labels.push_back(line);
    }
    is >> word >> count;
    for (std::size_t i = 0; i < count; ++i) {
        Dendrogram::Merge m;
        is >> m.a >> m.b >> m.height;
        tree.merges.push_back(m);
    }
    return tree;
}

}  // namespace cata
