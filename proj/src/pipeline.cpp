#include "cata/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cata/ca.hpp"
#include "cata/errors.hpp"
#include "cata/hca.hpp"
#include "cata/inference.hpp"
#include "cata/ingest.hpp"
#include "cata/mds.hpp"
#include "cata/mfa.hpp"
#include "cata/plsc.hpp"
#include "cata/serialize.hpp"
#include "cata/stats.hpp"
#include "cata/svg.hpp"

namespace fs = std::filesystem;

namespace cata {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot hash missing file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return fnv1a_hex(ss.str());
}

RunConfig RunConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigInvalid("cannot open config: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    c.experiment = j.value("experiment", std::string());
    c.responses = j.value("responses", std::string());
    c.recode_spec = j.value("recode_spec", std::string());
    c.translation = j.value("translation", std::string());
    c.table_x = j.value("table_x", std::string());
    c.table_y = j.value("table_y", std::string());
    c.drop_threshold = j.value("drop_threshold", 1.0);
    c.clusters = j.value("clusters", std::size_t{4});
    c.replicates = j.value("replicates", std::size_t{500});
    c.seed = j.value("seed", std::uint64_t{0});
    c.coverage = j.value("coverage", 0.95);
    c.alpha = j.value("alpha", 0.05);
    c.threads = j.value("threads", 1u);
    c.normalize_cooccurrence = j.value("normalize_cooccurrence", false);
    c.holdout_rows = j.value("holdout_rows", std::vector<std::string>{});
    c.out_dir = j.value("out_dir", std::string("out"));
    return c;
}

void RunConfig::validate() const {
    if (experiment != "qualities" && experiment != "adjectives" && experiment != "combined")
        throw ConfigInvalid("experiment must be qualities, adjectives or combined");
    auto must_exist = [](const std::string& p, const char* what) {
        if (!p.empty() && !fs::exists(p))
            throw ConfigInvalid(std::string(what) + " does not exist: " + p);
    };
    if (experiment == "combined") {
        if (table_x.empty() || table_y.empty())
            throw ConfigInvalid("combined mode needs table_x and table_y");
        must_exist(table_x, "table_x");
        must_exist(table_y, "table_y");
    } else {
        if (responses.empty()) throw ConfigInvalid("responses file required");
        must_exist(responses, "responses");
        must_exist(recode_spec, "recode_spec");
        must_exist(translation, "translation");
    }
    if (coverage <= 0.0 || coverage >= 1.0) throw ConfigInvalid("coverage must be in (0,1)");
    if (alpha <= 0.0 || alpha >= 1.0) throw ConfigInvalid("alpha must be in (0,1)");
    if (replicates < 1) throw ConfigInvalid("replicates must be >= 1");
    if (clusters < 1) throw ConfigInvalid("clusters must be >= 1");
}

namespace {

// Collects artifacts and annotates any stage failure with the stage name.
class Stage {
public:
    Stage(std::string out_dir, Manifest& manifest)
        : out_dir_(std::move(out_dir)), manifest_(manifest) {}

    template <typename Fn>
    void run(const std::string& name, Fn&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            throw Error("stage '" + name + "': " + e.what());
        }
    }

    std::string path(const std::string& rel) const { return (fs::path(out_dir_) / rel).string(); }

    void emit_text(const std::string& rel, const std::string& content) {
        std::ofstream os(path(rel), std::ios::binary);
        if (!os) throw Error("cannot write artifact: " + rel);
        os << content;
        os.close();
        manifest_.files.push_back({rel, hash_file(path(rel))});
    }

    template <typename Saver, typename Obj>
    void emit(const std::string& rel, Saver saver, const Obj& obj) {
        saver(obj, path(rel));
        manifest_.files.push_back({rel, hash_file(path(rel))});
    }

private:
    std::string out_dir_;
    Manifest& manifest_;
};

ContingencyTable table_without_rows(const ContingencyTable& table,
                                    const std::vector<std::string>& holdout) {
    LabeledMatrix m;
    m.col_labels = table.table.col_labels;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < table.rows(); ++i)
        if (std::find(holdout.begin(), holdout.end(),
                      table.table.row_labels[static_cast<std::size_t>(i)]) == holdout.end())
            keep.push_back(i);
    m.values.resize(static_cast<Eigen::Index>(keep.size()), table.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        m.row_labels.push_back(table.table.row_labels[static_cast<std::size_t>(keep[i])]);
        m.values.row(static_cast<Eigen::Index>(i)) = table.table.values.row(keep[i]);
    }
    return ContingencyTable::from(std::move(m));
}

LabeledMatrix transpose(const LabeledMatrix& m) {
    LabeledMatrix out;
    out.row_labels = m.col_labels;
    out.col_labels = m.row_labels;
    out.values = m.values.transpose();
    return out;
}

std::vector<MapPoint> score_points(const Eigen::MatrixXd& scores,
                                   const std::vector<std::string>& labels,
                                   const std::vector<int>& clusters) {
    std::vector<MapPoint> pts;
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        MapPoint p;
        p.label = labels[static_cast<std::size_t>(i)];
        p.x = scores(i, 0);
        p.y = scores.cols() > 1 ? scores(i, 1) : 0.0;
        p.color = static_cast<std::size_t>(i) < clusters.size()
                      ? clusters[static_cast<std::size_t>(i)]
                      : 0;
        pts.push_back(p);
    }
    return pts;
}

void emit_ca_figures(Stage& stage, const std::string& prefix, const CAModel& model,
                     const std::vector<int>& row_clusters,
                     const std::vector<MapPoint>& extra_rows,
                     const std::vector<bool>& significant) {
    stage.emit_text(prefix + "_scree.svg", render_scree(model.explained, significant, "Scree"));
    if (model.dimensions() < 2) return;
    auto rows = score_points(model.row_scores, model.row_labels, row_clusters);
    rows.insert(rows.end(), extra_rows.begin(), extra_rows.end());
    stage.emit_text(prefix + "_row_map.svg",
                    render_factor_map(rows, axis_label(1, model.eigenvalues(0), model.explained(0)),
                                      axis_label(2, model.eigenvalues(1), model.explained(1)),
                                      "Row factor scores"));
    stage.emit_text(
        prefix + "_col_map.svg",
        render_factor_map(score_points(model.col_scores, model.col_labels, {}),
                          axis_label(1, model.eigenvalues(0), model.explained(0)),
                          axis_label(2, model.eigenvalues(1), model.explained(1)),
                          "Column factor scores"));
    for (int dim = 0; dim < 2 && dim < model.dimensions(); ++dim) {
        stage.emit_text(prefix + "_contrib_rows_dim" + std::to_string(dim + 1) + ".svg",
                        render_contribution_bars(contributions(model, Side::Row), dim,
                                                 "Row contributions, dimension " +
                                                     std::to_string(dim + 1)));
        stage.emit_text(prefix + "_contrib_cols_dim" + std::to_string(dim + 1) + ".svg",
                        render_contribution_bars(contributions(model, Side::Column), dim,
                                                 "Column contributions, dimension " +
                                                     std::to_string(dim + 1)));
    }
}

// The shared qualities/adjectives flow; adjectives mode layers MFA and the
// group t-test on top.
void run_survey_mode(const RunConfig& config, Stage& stage) {
    LabelTranslation translation;
    if (!config.translation.empty()) translation = load_translation(config.translation);
    ResponseBrick raw;
    stage.run("parse", [&] { raw = parse_responses_file(config.responses, {}, translation); });

    // participant similarity comes from the raw binary brick
    CoOccurrenceMatrix cooc;
    MDSModel mds;
    stage.run("co-occurrence", [&] {
        cooc = co_occurrence(raw, config.normalize_cooccurrence);
        stage.emit("cooccurrence.txt", save_cooccurrence, cooc);
    });
    stage.run("mds", [&] {
        mds = fit_mds(cooc);
        mds.groups = raw.groups;
        stage.emit("mds.model", save_mds, mds);
    });

    ResampleResult boot;
    stage.run("bootstrap", [&] {
        ResampleOptions opts;
        opts.replicates = config.replicates;
        opts.seed = config.seed;
        opts.level = config.coverage;
        opts.threads = config.threads;
        boot = bootstrap_group_means(mds, opts);
        stage.emit("bootstrap.resample", save_resample, boot);
        std::vector<int> colors;
        std::vector<std::string> group_order = boot.group_labels;
        for (const auto& g : mds.groups)
            colors.push_back(static_cast<int>(
                std::find(group_order.begin(), group_order.end(), g) - group_order.begin()));
        std::string x_axis = axis_label(1, mds.eigenvalues(0), mds.explained(0));
        std::string y_axis = mds.dimensions() > 1
                                 ? axis_label(2, mds.eigenvalues(1), mds.explained(1))
                                 : std::string("Dimension 2");
        stage.emit_text("mds_map.svg",
                        render_mds_ellipse_map(score_points(mds.scores, mds.labels, colors),
                                               boot.ellipses, x_axis, y_axis,
                                               "Participant map with group ellipses"));
    });

    ResponseBrick brick = raw;
    if (!config.recode_spec.empty())
        stage.run("recode", [&] { brick = apply_recoding(raw, load_recode_spec(config.recode_spec)); });

    ContingencyTable table;
    stage.run("contingency", [&] {
        SparseDropReport report;
        table = drop_sparse_levels(sum_to_contingency(brick), config.drop_threshold, &report);
        for (const auto& col : report.removed_columns)
            std::cerr << "removed sparse column: " << col << "\n";
        stage.emit("contingency.table", save_table, table);
    });

    CAModel ca;
    std::vector<MapPoint> supplementary_points;
    stage.run("ca", [&] {
        ca = fit_ca(table);
        stage.emit("ca.model", save_ca, ca);
        if (!config.holdout_rows.empty()) {
            // outlier workflow: refit without the held-out rows, project
            // them back in as supplementary observations
            const auto reduced = table_without_rows(table, config.holdout_rows);
            ca = fit_ca(reduced);
            stage.emit("ca_refit.model", save_ca, ca);
            ModelDoc sup;
            sup.kind = "supplementary";
            for (const auto& label : config.holdout_rows) {
                const auto idx = table.table.row_index(label);
                if (idx < 0) throw ConfigInvalid("holdout row not in table: " + label);
                const Eigen::VectorXd f = project_supplementary(
                    ca, table.table.values.row(idx).transpose(), Side::Row);
                sup.set_vector(label, f);
                MapPoint p;
                p.label = label;
                p.x = f(0);
                p.y = f.size() > 1 ? f(1) : 0.0;
                p.color = 7;
                p.supplementary = true;
                supplementary_points.push_back(p);
            }
            stage.emit(
                "supplementary.model",
                [](const ModelDoc& d, const std::string& p) { d.save(p); }, sup);
        }
    });

    Dendrogram tree;
    std::vector<int> clusters;
    stage.run("hca", [&] {
        // all retained dimensions, not just the plotted two
        tree = fit_hca(ca.row_scores, ca.row_labels);
        stage.emit("dendrogram.txt", save_dendrogram, tree);
        clusters = cut_tree(tree, std::min(config.clusters, tree.n_leaves()));
        std::ostringstream elbow;
        elbow << "merge heights, last first:\n";
        for (double h : merge_height_drops(tree)) elbow << format_double(h) << "\n";
        stage.emit_text("elbow.txt", elbow.str());
    });

    ResampleResult perm;
    stage.run("permutation", [&] {
        ResampleOptions opts;
        opts.replicates = config.replicates;
        opts.seed = config.seed;
        opts.alpha = config.alpha;
        opts.threads = config.threads;
        perm = permutation_test_eigen(brick, opts);
        stage.emit("permutation.resample", save_resample, perm);
    });

    stage.run("figures", [&] {
        std::vector<bool> significant = perm.significant;
        significant.resize(static_cast<std::size_t>(ca.dimensions()), false);
        emit_ca_figures(stage, "ca", ca, clusters, supplementary_points, significant);
    });

    if (config.experiment == "adjectives") {
        stage.run("mfa", [&] {
            const auto group_bricks = split_by_group(brick);
            if (group_bricks.size() < 2)
                throw FewerThanTwoBlocks("MFA needs at least two participant groups");
            std::vector<ContingencyTable> tables;
            for (const auto& gb : group_bricks) {
                // keep only the columns surviving the pooled sparsity filter
                auto full = sum_to_contingency(gb);
                LabeledMatrix m;
                m.row_labels = full.table.row_labels;
                m.col_labels = table.table.col_labels;
                m.values.resize(full.rows(), table.cols());
                for (Eigen::Index j = 0; j < table.cols(); ++j)
                    m.values.col(j) = full.table.values.col(
                        full.table.col_index(table.table.col_labels[static_cast<std::size_t>(j)]));
                tables.push_back(ContingencyTable::from(std::move(m)));
            }
            auto fit_orientation = [&](const std::vector<ContingencyTable>& ts,
                                       const std::string& name) {
                const auto masses = pooled_row_masses(ts);
                std::vector<MFABlock> blocks;
                for (std::size_t k = 0; k < ts.size(); ++k)
                    blocks.push_back(preprocess_block(ts[k], masses, group_bricks[k].groups.front()));
                const auto model = fit_mfa(blocks);
                stage.emit(name + ".model", save_mfa, model);
                if (model.dimensions() >= 2)
                    stage.emit_text(name + "_map.svg",
                                    render_mfa_map(model, "Compromise and partial factor scores"));
            };
            fit_orientation(tables, "mfa_rows");
            std::vector<ContingencyTable> transposed;
            for (const auto& t : tables)
                transposed.push_back(ContingencyTable::from(transpose(t.table)));
            fit_orientation(transposed, "mfa_cols");
        });

        stage.run("welch", [&] {
            const auto result = welch_t(mds.scores.col(0), mds.groups);
            std::ostringstream os;
            os << "Welch t-test on MDS dimension 1 scores by group\n";
            os << result.group_a << ": M = " << format_double(result.mean_a)
               << ", SD = " << format_double(result.sd_a) << "\n";
            os << result.group_b << ": M = " << format_double(result.mean_b)
               << ", SD = " << format_double(result.sd_b) << "\n";
            os << "t(" << format_double(result.df) << ") = " << format_double(result.t)
               << ", p = " << format_double(result.p) << "\n";
            stage.emit_text("welch.txt", os.str());
        });
    }
}

void run_combined_mode(const RunConfig& config, Stage& stage) {
    ContingencyTable tx, ty;
    stage.run("load-tables", [&] {
        tx = load_table(config.table_x);
        ty = load_table(config.table_y);
    });

    LabeledMatrix x, y;
    stage.run("align", [&] {
        std::vector<std::string> removed;
        std::tie(x, y) = align_rows(tx.table, ty.table, &removed);
        for (const auto& label : removed)
            std::cerr << "dropped row present in only one table: " << label << "\n";
        std::ostringstream os;
        for (const auto& label : removed) os << label << "\n";
        stage.emit_text("dropped_rows.txt", os.str());
    });

    LatentPair pair;
    stage.run("plsc", [&] {
        pair = fit_plsc(x, y);
        stage.emit("plsc.model", save_plsc, pair);
    });

    ResampleResult perm;
    stage.run("permutation", [&] {
        ResampleOptions opts;
        opts.replicates = config.replicates;
        opts.seed = config.seed;
        opts.alpha = config.alpha;
        opts.threads = config.threads;
        perm = permutation_test_plsc(x, y, opts);
        stage.emit("permutation.resample", save_resample, perm);
    });

    stage.run("figures", [&] {
        std::vector<bool> significant = perm.significant;
        significant.resize(static_cast<std::size_t>(pair.dimensions()), false);
        stage.emit_text("plsc_scree.svg", render_scree(pair.explained, significant, "PLSC scree"));
        for (int dim = 0; dim < 2 && dim < pair.dimensions(); ++dim) {
            stage.emit_text("plsc_latent_dim" + std::to_string(dim + 1) + ".svg",
                            render_latent_pair_map(pair, dim, {},
                                                   "Latent variables " + std::to_string(dim + 1)));
            stage.emit_text("plsc_contrib_x_dim" + std::to_string(dim + 1) + ".svg",
                            render_contribution_bars(salience_contributions(pair, Side::Row), dim,
                                                     "X saliences, dimension " +
                                                         std::to_string(dim + 1)));
            stage.emit_text("plsc_contrib_y_dim" + std::to_string(dim + 1) + ".svg",
                            render_contribution_bars(salience_contributions(pair, Side::Column),
                                                     dim,
                                                     "Y saliences, dimension " +
                                                         std::to_string(dim + 1)));
        }
    });
}

}  // namespace

Manifest run_pipeline(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.out_dir);
    Manifest manifest;
    Stage stage(config.out_dir, manifest);

    if (config.experiment == "combined")
        run_combined_mode(config, stage);
    else
        run_survey_mode(config, stage);

    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });
    std::ofstream os(fs::path(config.out_dir) / "manifest.json", std::ios::binary);
    os << manifest.to_json();
    return manifest;
}

std::string Manifest::to_json() const {
    nlohmann::json j;
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) j["files"].push_back({{"path", f.path}, {"hash", f.hash}});
    return j.dump(2) + "\n";
}

std::string render_figure(const FigureSpec& spec) {
    const Side side = spec.side == "column" ? Side::Column : Side::Row;
    if (spec.kind == "scree") {
        std::vector<bool> significant;
        if (!spec.aux_path.empty()) significant = load_resample(spec.aux_path).significant;
        const auto doc = ModelDoc::load(spec.model_path);
        const Eigen::VectorXd explained = doc.vector("explained");
        return render_scree(explained, significant, spec.title.empty() ? "Scree" : spec.title);
    }
    if (spec.kind == "factor-map") {
        const auto model = load_ca(spec.model_path);
        if (model.dimensions() < 2) throw EmptyModel("factor map needs two dimensions");
        std::vector<int> clusters;
        if (!spec.aux_path.empty())
            clusters = cut_tree(load_dendrogram(spec.aux_path), 4);
        const auto& scores = side == Side::Row ? model.row_scores : model.col_scores;
        const auto& labels = side == Side::Row ? model.row_labels : model.col_labels;
        return render_factor_map(score_points(scores, labels, clusters),
                                 axis_label(1, model.eigenvalues(0), model.explained(0)),
                                 axis_label(2, model.eigenvalues(1), model.explained(1)),
                                 spec.title.empty() ? "Factor scores" : spec.title);
    }
    if (spec.kind == "contribution-bars") {
        const auto model = load_ca(spec.model_path);
        return render_contribution_bars(contributions(model, side), spec.dimension,
                                        spec.title.empty() ? "Contributions" : spec.title);
    }
    if (spec.kind == "mfa-partial-map") {
        return render_mfa_map(load_mfa(spec.model_path),
                              spec.title.empty() ? "Compromise and partial factor scores"
                                                 : spec.title);
    }
    if (spec.kind == "mds-ellipse-map") {
        const auto model = load_mds(spec.model_path);
        if (model.dimensions() < 1) throw EmptyModel("MDS model has no dimensions");
        std::vector<ConfidenceEllipse> ellipses;
        std::vector<int> colors;
        if (!spec.aux_path.empty()) {
            const auto boot = load_resample(spec.aux_path);
            ellipses = boot.ellipses;
            for (const auto& g : model.groups)
                colors.push_back(static_cast<int>(
                    std::find(boot.group_labels.begin(), boot.group_labels.end(), g) -
                    boot.group_labels.begin()));
        }
        const std::string x_axis = axis_label(1, model.eigenvalues(0), model.explained(0));
        const std::string y_axis = model.dimensions() > 1
                                       ? axis_label(2, model.eigenvalues(1), model.explained(1))
                                       : std::string("Dimension 2");
        return render_mds_ellipse_map(score_points(model.scores, model.labels, colors), ellipses,
                                      x_axis, y_axis,
                                      spec.title.empty() ? "Participant map" : spec.title);
    }
    if (spec.kind == "latent-pair-map") {
        return render_latent_pair_map(load_plsc(spec.model_path), spec.dimension, {},
                                      spec.title.empty() ? "Latent variables" : spec.title);
    }
    throw ConfigInvalid("unknown figure kind: " + spec.kind);
}

}  // namespace cata
