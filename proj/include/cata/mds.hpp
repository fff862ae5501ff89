#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/brick.hpp"

namespace cata {

// Classical (Torgerson) metric MDS solution.
struct MDSModel {
    std::vector<std::string> labels;
    std::vector<std::string> groups;  // optional, parallel to labels
    Eigen::MatrixXd scores;           // n x L, columns centered
    Eigen::VectorXd eigenvalues;      // positive retained, descending
    Eigen::VectorXd explained;        // over positive eigenvalues
    double negative_mass = 0.0;       // |sum of dropped negative eigenvalues|

    Eigen::Index dimensions() const { return eigenvalues.size(); }
};

// Symmetric nonnegative distances with zero diagonal.
struct DistanceMatrix {
    std::vector<std::string> labels;
    Eigen::MatrixXd distances;
};

MDSModel fit_mds(const DistanceMatrix& input, double tol = 1e-12);

// Co-occurrence counts are treated as inner products:
// d^2(p,q) = C_pp + C_qq - 2 C_pq, then classical scaling as above.
MDSModel fit_mds(const CoOccurrenceMatrix& input, double tol = 1e-12);

// Arithmetic mean of member scores per dimension for each distinct group,
// in first-appearance order. Returns (group labels, means matrix).
std::pair<std::vector<std::string>, Eigen::MatrixXd> group_means(const MDSModel& model);

void save_mds(const MDSModel& model, const std::string& path);
MDSModel load_mds(const std::string& path);

}  // namespace cata
