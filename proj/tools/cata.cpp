// Command-line driver for the CATA survey analysis pipeline.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>

#include "cata/ca.hpp"
#include "cata/errors.hpp"
#include "cata/hca.hpp"
#include "cata/inference.hpp"
#include "cata/ingest.hpp"
#include "cata/mds.hpp"
#include "cata/mfa.hpp"
#include "cata/pipeline.hpp"
#include "cata/plsc.hpp"
#include "cata/serialize.hpp"
#include "cata/svg.hpp"

namespace {

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw cata::Error("cannot write: " + path);
    os << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CATA survey multivariate analysis pipeline"};
    app.require_subcommand(1);

    // ingest: responses -> contingency table (+ co-occurrence)
    auto* ingest = app.add_subcommand("ingest", "parse, recode and tabulate survey responses");
    std::string in_responses, in_recode, in_translation, out_table, out_cooc;
    double threshold = 1.0;
    bool normalize = false;
    ingest->add_option("--responses", in_responses, "long-format responses file")->required();
    ingest->add_option("--recode", in_recode, "JSON recode spec");
    ingest->add_option("--translate", in_translation, "label translation table");
    ingest->add_option("--threshold", threshold, "sparse-column drop threshold (default 1)");
    ingest->add_option("--out", out_table, "output contingency table")->required();
    ingest->add_option("--cooccurrence", out_cooc, "also write the co-occurrence matrix here");
    ingest->add_flag("--normalize-cooccurrence", normalize,
                     "divide pair counts by shared-excerpt count");

    // ca
    auto* ca_cmd = app.add_subcommand("ca", "correspondence analysis of a contingency table");
    std::string ca_in, ca_out;
    std::vector<std::string> ca_holdout;
    ca_cmd->add_option("--table", ca_in, "serialized contingency table")->required();
    ca_cmd->add_option("--out", ca_out, "output CA model")->required();
    ca_cmd->add_option("--holdout", ca_holdout,
                       "rows to hold out and re-project as supplementary");

    // mds
    auto* mds_cmd = app.add_subcommand("mds", "metric MDS of a co-occurrence matrix");
    std::string mds_in, mds_out;
    mds_cmd->add_option("--cooccurrence", mds_in, "serialized co-occurrence matrix")->required();
    mds_cmd->add_option("--out", mds_out, "output MDS model")->required();

    // hca
    auto* hca_cmd = app.add_subcommand("hca", "Ward clustering of factor scores");
    std::string hca_in, hca_out, hca_side = "row";
    std::size_t hca_k = 4;
    hca_cmd->add_option("--model", hca_in, "CA model to cluster")->required();
    hca_cmd->add_option("--side", hca_side, "row or column scores (default row)");
    hca_cmd->add_option("--k", hca_k, "clusters for the reported cut (default 4)");
    hca_cmd->add_option("--out", hca_out, "output dendrogram")->required();

    // mfa
    auto* mfa_cmd = app.add_subcommand("mfa", "multiple factor analysis of block tables");
    std::vector<std::string> mfa_tables;
    std::string mfa_out;
    mfa_cmd->add_option("--tables", mfa_tables, "two or more block tables sharing rows")
        ->required()
        ->expected(2, -1);
    mfa_cmd->add_option("--out", mfa_out, "output MFA model")->required();

    // plsc
    auto* plsc_cmd = app.add_subcommand("plsc", "partial least squares correlation of two tables");
    std::string plsc_x, plsc_y, plsc_out;
    bool plsc_covariance = false;
    plsc_cmd->add_option("--x", plsc_x, "first table")->required();
    plsc_cmd->add_option("--y", plsc_y, "second table")->required();
    plsc_cmd->add_flag("--covariance", plsc_covariance, "center only, skip unit-norm scaling");
    plsc_cmd->add_option("--out", plsc_out, "output latent pair")->required();

    // boot
    auto* boot_cmd = app.add_subcommand("boot", "bootstrap group-mean confidence ellipses");
    std::string boot_model, boot_out;
    std::size_t boot_b = 1000;
    std::uint64_t boot_seed = 0;
    double boot_level = 0.95;
    unsigned boot_threads = 1;
    boot_cmd->add_option("--mds", boot_model, "MDS model with group labels")->required();
    boot_cmd->add_option("--replicates", boot_b, "bootstrap replicates (default 1000)");
    boot_cmd->add_option("--seed", boot_seed, "random seed (default 0)");
    boot_cmd->add_option("--level", boot_level, "coverage level (default 0.95)");
    boot_cmd->add_option("--threads", boot_threads, "worker threads (default 1)");
    boot_cmd->add_option("--out", boot_out, "output resample result")->required();

    // perm
    auto* perm_cmd = app.add_subcommand("perm", "permutation significance tests");
    std::string perm_responses, perm_recode, perm_x, perm_y, perm_out;
    std::size_t perm_b = 1000;
    std::uint64_t perm_seed = 0;
    double perm_alpha = 0.05;
    unsigned perm_threads = 1;
    perm_cmd->add_option("--responses", perm_responses,
                         "responses file (CA eigenvalue test)");
    perm_cmd->add_option("--recode", perm_recode, "recode spec applied before the test");
    perm_cmd->add_option("--x", perm_x, "first table (PLSC test)");
    perm_cmd->add_option("--y", perm_y, "second table (PLSC test)");
    perm_cmd->add_option("--replicates", perm_b, "permutations (default 1000)");
    perm_cmd->add_option("--seed", perm_seed, "random seed (default 0)");
    perm_cmd->add_option("--alpha", perm_alpha, "significance level (default 0.05)");
    perm_cmd->add_option("--threads", perm_threads, "worker threads (default 1)");
    perm_cmd->add_option("--out", perm_out, "output resample result")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "run a configured experiment end to end");
    std::string run_config;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    run_cmd->add_option("--config", run_config, "JSON run configuration")->required();
    run_cmd->add_option("--seed", run_seed, "override the config seed")
        ->each([&](const std::string&) { run_seed_set = true; });

    // render
    auto* render_cmd = app.add_subcommand("render", "regenerate a figure from a saved model");
    cata::FigureSpec fig;
    std::string render_out;
    render_cmd->add_option("--kind", fig.kind,
                           "scree | factor-map | contribution-bars | mfa-partial-map | "
                           "mds-ellipse-map | latent-pair-map")
        ->required();
    render_cmd->add_option("--model", fig.model_path, "serialized model")->required();
    render_cmd->add_option("--aux", fig.aux_path, "resample or dendrogram file, if needed");
    render_cmd->add_option("--side", fig.side, "row or column (default row)");
    render_cmd->add_option("--dimension", fig.dimension, "zero-based dimension index");
    render_cmd->add_option("--title", fig.title, "figure title");
    render_cmd->add_option("--out", render_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            cata::LabelTranslation translation;
            if (!in_translation.empty()) translation = cata::load_translation(in_translation);
            auto brick = cata::parse_responses_file(in_responses, {}, translation);
            if (!out_cooc.empty())
                cata::save_cooccurrence(cata::co_occurrence(brick, normalize), out_cooc);
            if (!in_recode.empty())
                brick = cata::apply_recoding(brick, cata::load_recode_spec(in_recode));
            cata::SparseDropReport report;
            auto table =
                cata::drop_sparse_levels(cata::sum_to_contingency(brick), threshold, &report);
            for (const auto& col : report.removed_columns)
                std::cerr << "removed sparse column: " << col << "\n";
            cata::save_table(table, out_table);
        } else if (*ca_cmd) {
            auto table = cata::load_table(ca_in);
            if (ca_holdout.empty()) {
                cata::save_ca(cata::fit_ca(table), ca_out);
            } else {
                cata::LabeledMatrix reduced;
                reduced.col_labels = table.table.col_labels;
                for (Eigen::Index i = 0; i < table.rows(); ++i) {
                    const auto& label = table.table.row_labels[static_cast<std::size_t>(i)];
                    if (std::find(ca_holdout.begin(), ca_holdout.end(), label) ==
                        ca_holdout.end()) {
                        reduced.row_labels.push_back(label);
                        reduced.values.conservativeResize(
                            static_cast<Eigen::Index>(reduced.row_labels.size()), table.cols());
                        reduced.values.row(reduced.values.rows() - 1) = table.table.values.row(i);
                    }
                }
                auto model = cata::fit_ca(cata::ContingencyTable::from(reduced));
                cata::save_ca(model, ca_out);
                for (const auto& label : ca_holdout) {
                    const auto idx = table.table.row_index(label);
                    if (idx < 0) throw cata::ConfigInvalid("holdout row not in table: " + label);
                    const Eigen::VectorXd f = cata::project_supplementary(
                        model, table.table.values.row(idx).transpose(), cata::Side::Row);
                    std::cout << label;
                    for (Eigen::Index l = 0; l < f.size(); ++l)
                        std::cout << "\t" << cata::format_double(f(l));
                    std::cout << "\n";
                }
            }
        } else if (*mds_cmd) {
            cata::save_mds(cata::fit_mds(cata::load_cooccurrence(mds_in)), mds_out);
        } else if (*hca_cmd) {
            auto model = cata::load_ca(hca_in);
            const auto& scores =
                hca_side == "column" ? model.col_scores : model.row_scores;
            const auto& labels = hca_side == "column" ? model.col_labels : model.row_labels;
            auto tree = cata::fit_hca(scores, labels);
            cata::save_dendrogram(tree, hca_out);
            const auto cut = cata::cut_tree(tree, std::min(hca_k, tree.n_leaves()));
            for (std::size_t i = 0; i < cut.size(); ++i)
                std::cout << labels[i] << "\t" << cut[i] << "\n";
        } else if (*mfa_cmd) {
            std::vector<cata::ContingencyTable> tables;
            for (const auto& path : mfa_tables) tables.push_back(cata::load_table(path));
            const auto masses = cata::pooled_row_masses(tables);
            std::vector<cata::MFABlock> blocks;
            for (std::size_t k = 0; k < tables.size(); ++k)
                blocks.push_back(
                    cata::preprocess_block(tables[k], masses, "block" + std::to_string(k)));
            cata::save_mfa(cata::fit_mfa(blocks), mfa_out);
        } else if (*plsc_cmd) {
            std::vector<std::string> removed;
            auto [x, y] = cata::align_rows(cata::load_table(plsc_x).table,
                                           cata::load_table(plsc_y).table, &removed);
            for (const auto& label : removed)
                std::cerr << "dropped row present in only one table: " << label << "\n";
            cata::PLSCOptions opts;
            opts.unit_norm = !plsc_covariance;
            cata::save_plsc(cata::fit_plsc(x, y, opts), plsc_out);
        } else if (*boot_cmd) {
            cata::ResampleOptions opts;
            opts.replicates = boot_b;
            opts.seed = boot_seed;
            opts.level = boot_level;
            opts.threads = boot_threads;
            cata::save_resample(cata::bootstrap_group_means(cata::load_mds(boot_model), opts),
                                boot_out);
        } else if (*perm_cmd) {
            cata::ResampleOptions opts;
            opts.replicates = perm_b;
            opts.seed = perm_seed;
            opts.alpha = perm_alpha;
            opts.threads = perm_threads;
            cata::ResampleResult result;
            if (!perm_responses.empty()) {
                auto brick = cata::parse_responses_file(perm_responses);
                if (!perm_recode.empty())
                    brick = cata::apply_recoding(brick, cata::load_recode_spec(perm_recode));
                result = cata::permutation_test_eigen(brick, opts);
            } else if (!perm_x.empty() && !perm_y.empty()) {
                auto [x, y] = cata::align_rows(cata::load_table(perm_x).table,
                                               cata::load_table(perm_y).table);
                result = cata::permutation_test_plsc(x, y, opts);
            } else {
                throw cata::ConfigInvalid("perm needs --responses or --x/--y");
            }
            cata::save_resample(result, perm_out);
            for (Eigen::Index l = 0; l < result.p_values.size(); ++l)
                std::cout << "dimension " << (l + 1) << ": p = "
                          << cata::format_double(result.p_values(l))
                          << (result.significant[static_cast<std::size_t>(l)] ? " *" : "")
                          << "\n";
        } else if (*run_cmd) {
            auto config = cata::RunConfig::from_json_file(run_config);
            if (run_seed_set) config.seed = run_seed;
            const auto manifest = cata::run_pipeline(config);
            std::cout << manifest.to_json();
        } else if (*render_cmd) {
            write_text(render_out, cata::render_figure(fig));
        }
    } catch (const cata::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
