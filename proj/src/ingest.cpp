#include "cata/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cata/errors.hpp"
#include "cata/serialize.hpp"

namespace cata {

namespace {

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

template <typename T>
std::size_t find_or_add(std::vector<T>& registry, const T& item) {
    for (std::size_t i = 0; i < registry.size(); ++i)
        if (registry[i] == item) return i;
    registry.push_back(item);
    return registry.size() - 1;
}

}  // namespace

ResponseBrick parse_responses(std::istream& input, const ResponseSchema& schema,
                              const LabelTranslation& translation) {
    std::string line;
    if (!std::getline(input, line)) throw MissingColumn("empty input, no header row");
    line = strip_cr(line);
    auto header = split(line, schema.delimiter);
    auto col_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw MissingColumn("missing column: " + name);
    };
    const std::size_t ci_participant = col_of(schema.participant);
    const std::size_t ci_group = col_of(schema.group);
    const std::size_t ci_excerpt = col_of(schema.excerpt);
    const std::size_t ci_variable = col_of(schema.variable);
    const std::size_t ci_level = col_of(schema.level);
    const std::size_t ci_value = col_of(schema.value);

    auto translate = [&](const std::string& s) {
        auto it = translation.find(s);
        return it == translation.end() ? s : it->second;
    };

    struct Row {
        std::size_t p, e, l;
        double v;
    };
    ResponseBrick brick;
    std::vector<Row> rows;
    std::set<std::pair<std::size_t, std::size_t>> seen_pe;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen_cell;

    std::size_t line_no = 1;
    while (std::getline(input, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split(line, schema.delimiter);
        if (fields.size() != header.size())
            throw MissingColumn("line " + std::to_string(line_no) + ": expected " +
                                std::to_string(header.size()) + " fields, got " +
                                std::to_string(fields.size()));
        const std::string value_str = fields[ci_value];
        double v;
        if (value_str == "0")
            v = 0.0;
        else if (value_str == "1")
            v = 1.0;
        else
            throw NonBinaryValue("line " + std::to_string(line_no) + ": value must be 0 or 1, got '" +
                                 value_str + "'");

        std::size_t p = find_or_add(brick.participants, fields[ci_participant]);
        if (p == brick.groups.size())
            brick.groups.push_back(fields[ci_group]);
        else if (brick.groups[p] != fields[ci_group])
            throw UnknownGroupKey("participant " + fields[ci_participant] +
                                  " appears with two group labels");
        std::size_t e = find_or_add(brick.excerpts, fields[ci_excerpt]);
        LevelId lid{translate(fields[ci_variable]), translate(fields[ci_level])};
        std::size_t l = find_or_add(brick.levels, lid);

        if (!seen_cell.insert({p, e, l}).second)
            throw DuplicateCell("duplicate cell " + fields[ci_participant] + "/" +
                                fields[ci_excerpt] + "/" + lid.label());
        seen_pe.insert({p, e});
        rows.push_back({p, e, l, v});
    }

    const auto P = static_cast<Eigen::Index>(brick.participants.size());
    const auto E = static_cast<Eigen::Index>(brick.excerpts.size());
    const auto L = static_cast<Eigen::Index>(brick.levels.size());
    brick.presented.setConstant(P, E, false);
    for (auto [p, e] : seen_pe)
        brick.presented(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(e)) = true;
    brick.values.assign(static_cast<std::size_t>(P), Eigen::MatrixXd::Zero(E, L));
    for (const auto& r : rows)
        brick.values[r.p](static_cast<Eigen::Index>(r.e), static_cast<Eigen::Index>(r.l)) = r.v;
    return brick;
}

ResponseBrick parse_responses_file(const std::string& path, const ResponseSchema& schema,
                                   const LabelTranslation& translation) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open responses file: " + path);
    return parse_responses(is, schema, translation);
}

LabelTranslation load_translation(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open translation file: " + path);
    LabelTranslation t;
    std::string line;
    while (std::getline(is, line)) {
        line = strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        auto pos = line.find('\t');
        if (pos == std::string::npos) throw Error("translation line missing tab: " + line);
        t[line.substr(0, pos)] = line.substr(pos + 1);
    }
    return t;
}

namespace {

ResponseBrick apply_collapse(const ResponseBrick& brick, const CollapseRule& rule,
                             RecodeReport* report) {
    // Resolve source columns and merged output names.
    std::vector<std::ptrdiff_t> src_of_level(brick.levels.size(), -1);
    std::vector<std::string> merged_name_of_level(brick.levels.size());
    for (const auto& [from, to] : rule.merge) {
        auto idx = brick.level_index(rule.variable, from);
        if (idx < 0) throw UnknownLevel("collapse: unknown level " + rule.variable + ":" + from);
        src_of_level[static_cast<std::size_t>(idx)] = idx;
        merged_name_of_level[static_cast<std::size_t>(idx)] = to;
    }

    // New registry: merged level takes the slot of its first source; other
    // sources are dropped; everything else keeps first-appearance order.
    ResponseBrick out;
    out.participants = brick.participants;
    out.excerpts = brick.excerpts;
    out.groups = brick.groups;
    out.presented = brick.presented;

    std::vector<std::vector<std::size_t>> sources_of_new;  // old level indices feeding column
    std::set<std::string> emitted_merged;
    for (std::size_t l = 0; l < brick.levels.size(); ++l) {
        if (src_of_level[l] < 0) {
            out.levels.push_back(brick.levels[l]);
            sources_of_new.push_back({l});
            continue;
        }
        const std::string& to = merged_name_of_level[l];
        if (!emitted_merged.insert(to).second) continue;  // already placed
        LevelId merged{rule.variable, to};
        if (std::find(out.levels.begin(), out.levels.end(), merged) != out.levels.end())
            throw ConflictingRules("collapse output column already exists: " + merged.label());
        out.levels.push_back(merged);
        std::vector<std::size_t> srcs;
        for (std::size_t l2 = 0; l2 < brick.levels.size(); ++l2)
            if (src_of_level[l2] >= 0 && merged_name_of_level[l2] == to) srcs.push_back(l2);
        sources_of_new.push_back(std::move(srcs));
    }

    const auto E = static_cast<Eigen::Index>(brick.n_excerpts());
    const auto Lnew = static_cast<Eigen::Index>(out.levels.size());
    out.values.reserve(brick.values.size());
    for (const auto& slice : brick.values) {
        Eigen::MatrixXd ns = Eigen::MatrixXd::Zero(E, Lnew);
        for (Eigen::Index j = 0; j < Lnew; ++j) {
            const auto& srcs = sources_of_new[static_cast<std::size_t>(j)];
            for (Eigen::Index e = 0; e < E; ++e) {
                double v = 0.0;
                for (auto s : srcs) v += slice(e, static_cast<Eigen::Index>(s));
                // logical OR for merged binary columns: cap at 1
                double capped = srcs.size() > 1 ? std::min(v, 1.0) : v;
                if (report) report->cap_reduction += v - capped;
                ns(e, j) = capped;
            }
        }
        out.values.push_back(std::move(ns));
    }
    return out;
}

ResponseBrick apply_barycentric(const ResponseBrick& brick, const BarycentricRule& rule) {
    struct VarInfo {
        std::size_t trigger_col;
        std::vector<std::size_t> remaining_cols;
    };
    std::vector<VarInfo> vars;
    std::set<std::size_t> dropped;
    for (const auto& var : rule.target_variables) {
        auto trig = brick.level_index(var, rule.trigger_level);
        if (trig < 0)
            throw UnknownLevel("barycentric: variable " + var + " has no level '" +
                               rule.trigger_level + "'");
        VarInfo info;
        info.trigger_col = static_cast<std::size_t>(trig);
        dropped.insert(info.trigger_col);
        for (std::size_t l = 0; l < brick.levels.size(); ++l)
            if (brick.levels[l].variable == var && l != info.trigger_col)
                info.remaining_cols.push_back(l);
        vars.push_back(std::move(info));
    }
    if (brick.level_index(rule.melody_variable, "Yes") >= 0 ||
        brick.level_index(rule.melody_variable, "No") >= 0)
        throw ConflictingRules("barycentric output variable already exists: " +
                               rule.melody_variable);

    ResponseBrick out;
    out.participants = brick.participants;
    out.excerpts = brick.excerpts;
    out.groups = brick.groups;
    out.presented = brick.presented;
    std::vector<std::size_t> kept;  // old level index per surviving column
    for (std::size_t l = 0; l < brick.levels.size(); ++l)
        if (!dropped.count(l)) {
            out.levels.push_back(brick.levels[l]);
            kept.push_back(l);
        }
    out.levels.push_back({rule.melody_variable, "Yes"});
    out.levels.push_back({rule.melody_variable, "No"});
    const auto yes_col = static_cast<Eigen::Index>(out.levels.size() - 2);
    const auto no_col = static_cast<Eigen::Index>(out.levels.size() - 1);

    const auto E = static_cast<Eigen::Index>(brick.n_excerpts());
    const auto Lnew = static_cast<Eigen::Index>(out.levels.size());
    std::vector<std::ptrdiff_t> new_of_old(brick.levels.size(), -1);
    for (std::size_t j = 0; j < kept.size(); ++j)
        new_of_old[kept[j]] = static_cast<std::ptrdiff_t>(j);

    for (std::size_t p = 0; p < brick.n_participants(); ++p) {
        const auto& slice = brick.values[p];
        Eigen::MatrixXd ns = Eigen::MatrixXd::Zero(E, Lnew);
        for (std::size_t j = 0; j < kept.size(); ++j)
            ns.col(static_cast<Eigen::Index>(j)) = slice.col(static_cast<Eigen::Index>(kept[j]));
        for (Eigen::Index e = 0; e < E; ++e) {
            if (!brick.presented(static_cast<Eigen::Index>(p), e)) continue;
            bool any_trigger = false;
            for (const auto& var : vars) {
                if (slice(e, static_cast<Eigen::Index>(var.trigger_col)) <= 0.0) continue;
                any_trigger = true;
                // replace this variable's row with the barycenter of its
                // remaining levels
                const double share = 1.0 / static_cast<double>(var.remaining_cols.size());
                for (auto rc : var.remaining_cols)
                    ns(e, static_cast<Eigen::Index>(new_of_old[rc])) = share;
            }
            if (any_trigger)
                ns(e, no_col) = 1.0;
            else
                ns(e, yes_col) = 1.0;
        }
        out.values.push_back(std::move(ns));
    }
    return out;
}

}  // namespace

ResponseBrick apply_recoding(const ResponseBrick& brick, const RecodeSpec& spec,
                             RecodeReport* report) {
    ResponseBrick current = brick;
    for (const auto& rule : spec.rules) {
        if (rule.kind == RecodeRule::Kind::Collapse)
            current = apply_collapse(current, rule.collapse, report);
        else
            current = apply_barycentric(current, rule.barycentric);
    }
    return current;
}

RecodeSpec parse_recode_spec(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("recode spec is not valid JSON: ") + e.what());
    }
    RecodeSpec spec;
    for (const auto& r : j.at("rules")) {
        RecodeRule rule;
        if (r.contains("collapse")) {
            rule.kind = RecodeRule::Kind::Collapse;
            const auto& c = r.at("collapse");
            rule.collapse.variable = c.at("variable").get<std::string>();
            for (const auto& [from, to] : c.at("merge").items())
                rule.collapse.merge.emplace_back(from, to.get<std::string>());
            std::sort(rule.collapse.merge.begin(), rule.collapse.merge.end());
        } else if (r.contains("barycentric")) {
            rule.kind = RecodeRule::Kind::Barycentric;
            const auto& b = r.at("barycentric");
            rule.barycentric.trigger_level = b.at("trigger").get<std::string>();
            rule.barycentric.target_variables = b.at("variables").get<std::vector<std::string>>();
            rule.barycentric.melody_variable = b.value("melody_variable", std::string("Melody"));
        } else {
            throw Error("recode rule must be 'collapse' or 'barycentric'");
        }
        spec.rules.push_back(std::move(rule));
    }
    return spec;
}

RecodeSpec load_recode_spec(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open recode spec: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_recode_spec(ss.str());
}

ContingencyTable sum_to_contingency(const ResponseBrick& brick) {
    if (brick.values.empty()) throw EmptyBrick("brick has no participants");
    const auto E = static_cast<Eigen::Index>(brick.n_excerpts());
    const auto L = static_cast<Eigen::Index>(brick.n_levels());
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(E, L);
    for (const auto& slice : brick.values) sum += slice;
    if (sum.sum() <= 0.0) throw EmptyBrick("brick is all zero");
    LabeledMatrix m;
    m.row_labels = brick.excerpts;
    m.col_labels = brick.level_labels();
    m.values = std::move(sum);
    return ContingencyTable::from(std::move(m));
}

ContingencyTable drop_sparse_levels(const ContingencyTable& table, double threshold,
                                    SparseDropReport* report) {
    if (threshold < 0.0) throw Error("drop_sparse_levels: threshold must be >= 0");
    std::vector<Eigen::Index> keep;
    SparseDropReport rep;
    rep.threshold = threshold;
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
        if (table.table.values.col(j).sum() <= threshold)
            rep.removed_columns.push_back(table.table.col_labels[static_cast<std::size_t>(j)]);
        else
            keep.push_back(j);
    }
    if (keep.empty()) throw AllColumnsRemoved("every column is at or below the sparsity threshold");
    LabeledMatrix m;
    m.row_labels = table.table.row_labels;
    m.values.resize(table.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        m.col_labels.push_back(table.table.col_labels[static_cast<std::size_t>(keep[j])]);
        m.values.col(static_cast<Eigen::Index>(j)) = table.table.values.col(keep[j]);
    }
    if (report) *report = std::move(rep);
    return ContingencyTable::from(std::move(m));
}

CoOccurrenceMatrix co_occurrence(const ResponseBrick& brick, bool normalize) {
    if (!brick.is_binary())
        throw NonBinaryBrick("co-occurrence requires a binary brick (run before recoding)");
    const auto P = static_cast<Eigen::Index>(brick.n_participants());
    const auto E = static_cast<Eigen::Index>(brick.n_excerpts());
    CoOccurrenceMatrix m;
    m.participants = brick.participants;
    m.normalized = normalize;
    m.cells = Eigen::MatrixXd::Zero(P, P);
    m.diag = Eigen::VectorXd::Zero(P);
    for (Eigen::Index p = 0; p < P; ++p)
        m.diag(p) = brick.values[static_cast<std::size_t>(p)].sum();
    for (Eigen::Index p = 0; p < P; ++p) {
        for (Eigen::Index q = p; q < P; ++q) {
            double common = 0.0;
            double shared = 0.0;
            for (Eigen::Index e = 0; e < E; ++e) {
                if (!brick.presented(p, e) || !brick.presented(q, e)) continue;
                shared += 1.0;
                common += brick.values[static_cast<std::size_t>(p)]
                              .row(e)
                              .cwiseProduct(brick.values[static_cast<std::size_t>(q)].row(e))
                              .sum();
            }
            double v = common;
            if (normalize && shared > 0.0) v /= shared;
            m.cells(p, q) = v;
            m.cells(q, p) = v;
        }
    }
    if (normalize)
        m.diag = m.cells.diagonal();
    return m;
}

std::vector<ResponseBrick> split_by_group(const ResponseBrick& brick) {
    if (brick.groups.size() != brick.n_participants())
        throw UnknownGroupKey("every participant must carry a group label");
    std::vector<std::string> order;
    for (const auto& g : brick.groups) find_or_add(order, g);
    std::vector<ResponseBrick> out;
    for (const auto& g : order) {
        ResponseBrick b;
        b.excerpts = brick.excerpts;
        b.levels = brick.levels;
        std::vector<Eigen::Index> members;
        for (std::size_t p = 0; p < brick.n_participants(); ++p)
            if (brick.groups[p] == g) {
                b.participants.push_back(brick.participants[p]);
                b.groups.push_back(g);
                b.values.push_back(brick.values[p]);
                members.push_back(static_cast<Eigen::Index>(p));
            }
        b.presented.resize(static_cast<Eigen::Index>(members.size()), brick.presented.cols());
        for (std::size_t i = 0; i < members.size(); ++i)
            b.presented.row(static_cast<Eigen::Index>(i)) = brick.presented.row(members[i]);
        out.push_back(std::move(b));
    }
    return out;
}

void save_table(const ContingencyTable& table, const std::string& path) {
    ModelDoc doc;
    doc.kind = "table";
    doc.set_scalar("n", table.n);
    doc.set_matrix("cells", table.table);
    doc.save(path);
}

ContingencyTable load_table(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "table") throw Error("not a table file: " + path);
    ContingencyTable t;
    t.table = doc.matrix("cells");
    t.n = doc.scalar("n");
    return t;
}

void save_cooccurrence(const CoOccurrenceMatrix& m, const std::string& path) {
    ModelDoc doc;
    doc.kind = "cooccurrence";
    doc.set_scalar("normalized", m.normalized ? 1.0 : 0.0);
    doc.set_matrix("cells", m.cells, m.participants, m.participants);
    doc.set_vector("diag", m.diag, m.participants);
    doc.save(path);
}

CoOccurrenceMatrix load_cooccurrence(const std::string& path) {
    auto doc = ModelDoc::load(path);
    if (doc.kind != "cooccurrence") throw Error("not a co-occurrence file: " + path);
    CoOccurrenceMatrix m;
    m.participants = doc.matrix("cells").row_labels;
    m.cells = doc.matrix("cells").values;
    m.diag = doc.vector("diag");
    m.normalized = doc.scalar("normalized") != 0.0;
    return m;
}

}  // namespace cata
