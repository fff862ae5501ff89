#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cata {

// Dense matrix with row/column label registries. The workhorse carrier for
// contingency tables, factor scores, saliences and the like.
struct LabeledMatrix {
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    Eigen::MatrixXd values;

    LabeledMatrix() = default;
    LabeledMatrix(std::vector<std::string> rows, std::vector<std::string> cols)
        : row_labels(std::move(rows)),
          col_labels(std::move(cols)),
          values(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(row_labels.size()),
                                       static_cast<Eigen::Index>(col_labels.size()))) {}

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    std::ptrdiff_t row_index(const std::string& label) const {
        for (std::size_t i = 0; i < row_labels.size(); ++i)
            if (row_labels[i] == label) return static_cast<std::ptrdiff_t>(i);
        return -1;
    }
    std::ptrdiff_t col_index(const std::string& label) const {
        for (std::size_t j = 0; j < col_labels.size(); ++j)
            if (col_labels[j] == label) return static_cast<std::ptrdiff_t>(j);
        return -1;
    }
};

}  // namespace cata
