#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cata/brick.hpp"
#include "cata/rng.hpp"

namespace test_util {

// Brick with every excerpt presented to every participant and all-zero values.
inline cata::ResponseBrick make_brick(std::size_t participants, std::size_t excerpts,
                                      const std::vector<cata::LevelId>& levels) {
    cata::ResponseBrick b;
    for (std::size_t p = 0; p < participants; ++p) {
        b.participants.push_back("p" + std::to_string(p + 1));
        b.groups.push_back("g");
    }
    for (std::size_t e = 0; e < excerpts; ++e) b.excerpts.push_back("e" + std::to_string(e + 1));
    b.levels = levels;
    b.presented.setConstant(static_cast<Eigen::Index>(participants),
                            static_cast<Eigen::Index>(excerpts), true);
    b.values.assign(participants,
                    Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(excerpts),
                                          static_cast<Eigen::Index>(levels.size())));
    return b;
}

inline std::vector<cata::LevelId> simple_levels(std::size_t count) {
    std::vector<cata::LevelId> levels;
    for (std::size_t l = 0; l < count; ++l)
        levels.push_back({"adj", "L" + std::to_string(l + 1)});
    return levels;
}

// Strictly positive random contingency table (no zero margins).
inline cata::ContingencyTable random_table(cata::RandomStream& rng, Eigen::Index rows,
                                           Eigen::Index cols) {
    cata::LabeledMatrix m;
    for (Eigen::Index i = 0; i < rows; ++i) m.row_labels.push_back("r" + std::to_string(i));
    for (Eigen::Index j = 0; j < cols; ++j) m.col_labels.push_back("c" + std::to_string(j));
    m.values.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            m.values(i, j) = 0.2 + 10.0 * rng.next_double();
    return cata::ContingencyTable::from(m);
}

inline Eigen::MatrixXd random_matrix(cata::RandomStream& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

}  // namespace test_util
