#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "cata/labeled_matrix.hpp"

namespace cata {

// (variable, level) pair identifying one descriptor column of the brick.
struct LevelId {
    std::string variable;
    std::string level;
    bool operator==(const LevelId&) const = default;
    std::string label() const { return variable + ":" + level; }
};

// 3-D response array: participants x excerpts x descriptor levels, plus a
// presence mask recording which excerpts each participant actually rated.
// Raw responses are 0/1; barycentric recoding introduces fractions in [0,1].
struct ResponseBrick {
    std::vector<std::string> participants;
    std::vector<std::string> excerpts;
    std::vector<LevelId> levels;
    std::vector<std::string> groups;  // per participant

    // values[p] is an excerpts x levels slice.
    std::vector<Eigen::MatrixXd> values;
    // presented(p, e)
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> presented;

    std::size_t n_participants() const { return participants.size(); }
    std::size_t n_excerpts() const { return excerpts.size(); }
    std::size_t n_levels() const { return levels.size(); }

    std::ptrdiff_t level_index(const std::string& variable, const std::string& level) const {
        for (std::size_t l = 0; l < levels.size(); ++l)
            if (levels[l].variable == variable && levels[l].level == level)
                return static_cast<std::ptrdiff_t>(l);
        return -1;
    }

    bool is_binary(double tol = 0.0) const {
        for (const auto& slice : values)
            for (Eigen::Index e = 0; e < slice.rows(); ++e)
                for (Eigen::Index l = 0; l < slice.cols(); ++l) {
                    double v = slice(e, l);
                    if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
                }
        return true;
    }

    std::vector<std::string> level_labels() const {
        std::vector<std::string> out;
        out.reserve(levels.size());
        for (const auto& l : levels) out.push_back(l.label());
        return out;
    }
};

// Excerpts x levels (or any labeled) nonnegative table with grand total n.
struct ContingencyTable {
    LabeledMatrix table;
    double n = 0.0;

    static ContingencyTable from(LabeledMatrix m) {
        ContingencyTable t;
        t.n = m.values.sum();
        t.table = std::move(m);
        return t;
    }
    Eigen::Index rows() const { return table.rows(); }
    Eigen::Index cols() const { return table.cols(); }
};

// Symmetric participant x participant common-choice counts. The diagonal
// holds each participant's total selection count.
struct CoOccurrenceMatrix {
    std::vector<std::string> participants;
    Eigen::MatrixXd cells;
    Eigen::VectorXd diag;
    bool normalized = false;
};

// Declarative recode program applied to a brick in rule order.
struct CollapseRule {
    std::string variable;
    // old level -> merged level name
    std::vector<std::pair<std::string, std::string>> merge;
};

struct BarycentricRule {
    std::string trigger_level;                  // e.g. the "no melody" option
    std::vector<std::string> target_variables;  // variables carrying the trigger
    std::string melody_variable;                // output variable with Yes/No levels
};

struct RecodeRule {
    enum class Kind { Collapse, Barycentric } kind;
    CollapseRule collapse;
    BarycentricRule barycentric;
};

struct RecodeSpec {
    std::vector<RecodeRule> rules;
};

}  // namespace cata
