#include "cata/mfa.hpp"

#include <cmath>

#include "cata/errors.hpp"
#include "cata/gsvd.hpp"
#include "cata/serialize.hpp"

namespace cata {

Eigen::VectorXd pooled_row_masses(const std::vector<ContingencyTable>& tables) {
    if (tables.empty()) throw FewerThanTwoBlocks("no tables given");
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(tables.front().rows());
    double total = 0.0;
    for (const auto& t : tables) {
        if (t.rows() != row_sums.size() ||
            t.table.row_labels != tables.front().table.row_labels)
            throw RowRegistryMismatch("tables do not share a row registry");
        row_sums += t.table.values.rowwise().sum();
        total += t.n;
    }
    return row_sums / total;
}

MFABlock preprocess_block(const ContingencyTable& table, const Eigen::VectorXd& shared_row_masses,
                          const std::string& id) {
    if (shared_row_masses.size() != table.rows())
        throw RowRegistryMismatch("shared row masses do not match the table's rows");
    if ((shared_row_masses.array() <= 0.0).any())
        throw NonPositiveWeight("shared row masses must be positive");
    if (table.n <= 0.0) throw DegenerateBlock("block has zero grand total");

    const Eigen::MatrixXd z = table.table.values / table.n;
    const Eigen::VectorXd c = z.colwise().sum();
    if ((c.array() <= 0.0).any()) throw DegenerateBlock("block has an all-zero column");
    const Eigen::VectorXd& r = shared_row_masses;

    MFABlock block;
    block.id = id;
    block.row_labels = table.table.row_labels;
    block.col_labels = table.table.col_labels;
    block.residual = r.array().rsqrt().matrix().asDiagonal() * (z - r * c.transpose()) *
                     c.array().rsqrt().matrix().asDiagonal();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(block.residual);
    block.first_singular = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    const double scale = 1e-12 * block.residual.norm() + 1e-300;
    if (block.first_singular <= scale)
        throw DegenerateBlock("block residual is zero (independence pattern)");
    block.weight = 1.0 / block.first_singular;
    return block;
}

MFAModel fit_mfa(const std::vector<MFABlock>& blocks) {
    if (blocks.size() < 2) throw FewerThanTwoBlocks("MFA needs at least two blocks");
    const Eigen::Index rows = blocks.front().residual.rows();
    Eigen::Index total_cols = 0;
    for (const auto& b : blocks) {
        if (b.residual.rows() != rows || b.row_labels != blocks.front().row_labels)
            throw RowRegistryMismatch("blocks do not share a row registry");
        total_cols += b.residual.cols();
    }

    Eigen::MatrixXd concat(rows, total_cols);
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        concat.middleCols(offset, b.residual.cols()) = b.weight * b.residual;
        offset += b.residual.cols();
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(concat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff =
        1e-12 * static_cast<double>(std::max(rows, total_cols)) * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;

    Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
    Eigen::MatrixXd v = svd.matrixV().leftCols(rank);
    fix_signs(u, v);

    MFAModel model;
    model.row_labels = blocks.front().row_labels;
    model.eigenvalues = sv.head(rank).array().square();
    model.explained = model.eigenvalues.sum() > 0.0
                          ? Eigen::VectorXd(model.eigenvalues / model.eigenvalues.sum())
                          : Eigen::VectorXd::Zero(rank);
    model.compromise = u * sv.head(rank).asDiagonal();

    const double K = static_cast<double>(blocks.size());
    offset = 0;
    for (const auto& b : blocks) {
        model.block_ids.push_back(b.id);
        const Eigen::MatrixXd vk = v.middleRows(offset, b.residual.cols());
        model.partial.push_back(K * b.weight * b.residual * vk);
        model.loadings.push_back(vk);
        offset += b.residual.cols();
    }
    return model;
}

void save_mfa(const MFAModel& model, const std::string& path) {
    ModelDoc doc;
    doc.kind = "mfa";
    doc.set_scalar("blocks", static_cast<double>(model.block_ids.size()));
    doc.set_vector("eigenvalues", model.eigenvalues);
    doc.set_vector("explained", model.explained);
    doc.set_matrix("compromise", model.compromise, model.row_labels, {});
    for (std::size_t k = 0; k < model.block_ids.size(); ++k) {
        doc.set_text("block_" + std::to_string(k), model.block_ids[k]);
        doc.set_matrix("partial_" + std::to_string(k), model.partial[k], model.row_labels, {});
        doc.set_matrix("loadings_" + std::to_string(k), model.loadings[k]);
    }
    doc.save(path);
}

MFAModel load_mfa(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "mfa") throw Error("not an MFA model file: " + path);
    MFAModel m;
    m.eigenvalues = doc.vector("eigenvalues");
    m.explained = doc.vector("explained");
    m.compromise = doc.matrix("compromise").values;
    m.row_labels = doc.matrix("compromise").row_labels;
    const auto k = static_cast<std::size_t>(doc.scalar("blocks"));
    for (std::size_t i = 0; i < k; ++i) {
        m.block_ids.push_back(doc.text("block_" + std::to_string(i)));
        m.partial.push_back(doc.matrix("partial_" + std::to_string(i)).values);
        m.loadings.push_back(doc.matrix("loadings_" + std::to_string(i)).values);
    }
    return m;
}

}  // namespace cata
