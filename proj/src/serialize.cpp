#include "cata/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cata/errors.hpp"

namespace cata {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ModelDoc::Entry& ModelDoc::upsert(const std::string& name, Entry::Kind kind) {
    for (auto& [n, e] : entries_)
        if (n == name) {
            e = Entry{};
            e.kind = kind;
            return e;
        }
    entries_.emplace_back(name, Entry{});
    entries_.back().second.kind = kind;
    return entries_.back().second;
}

const ModelDoc::Entry& ModelDoc::find(const std::string& name) const {
    for (const auto& [n, e] : entries_)
        if (n == name) return e;
    throw Error("model entry not found: " + name);
}

bool ModelDoc::has(const std::string& name) const {
    for (const auto& [n, e] : entries_)
        if (n == name) return true;
    return false;
}

void ModelDoc::set_scalar(const std::string& name, double v) {
    upsert(name, Entry::Kind::Scalar).scalar_value = v;
}

void ModelDoc::set_text(const std::string& name, const std::string& v) {
    upsert(name, Entry::Kind::Text).text_value = v;
}

void ModelDoc::set_vector(const std::string& name, const Eigen::VectorXd& v,
                          const std::vector<std::string>& labels) {
    auto& e = upsert(name, Entry::Kind::Vector);
    e.mat.values = v;
    e.mat.row_labels = labels;
    if (e.mat.row_labels.empty())
        for (Eigen::Index i = 0; i < v.size(); ++i)
            e.mat.row_labels.push_back(std::to_string(i));
    e.mat.col_labels = {"value"};
}

void ModelDoc::set_matrix(const std::string& name, const LabeledMatrix& m) {
    upsert(name, Entry::Kind::Matrix).mat = m;
}

void ModelDoc::set_matrix(const std::string& name, const Eigen::MatrixXd& m,
                          const std::vector<std::string>& row_labels,
                          const std::vector<std::string>& col_labels) {
    LabeledMatrix lm;
    lm.values = m;
    lm.row_labels = row_labels;
    lm.col_labels = col_labels;
    if (lm.row_labels.empty())
        for (Eigen::Index i = 0; i < m.rows(); ++i) lm.row_labels.push_back(std::to_string(i));
    if (lm.col_labels.empty())
        for (Eigen::Index j = 0; j < m.cols(); ++j) lm.col_labels.push_back(std::to_string(j));
    set_matrix(name, lm);
}

double ModelDoc::scalar(const std::string& name) const {
    const auto& e = find(name);
    if (e.kind != Entry::Kind::Scalar) throw Error("not a scalar: " + name);
    return e.scalar_value;
}

std::string ModelDoc::text(const std::string& name) const {
    const auto& e = find(name);
    if (e.kind != Entry::Kind::Text) throw Error("not a text entry: " + name);
    return e.text_value;
}

Eigen::VectorXd ModelDoc::vector(const std::string& name) const {
    const auto& e = find(name);
    if (e.kind != Entry::Kind::Vector) throw Error("not a vector: " + name);
    return e.mat.values.col(0);
}

std::vector<std::string> ModelDoc::vector_labels(const std::string& name) const {
    const auto& e = find(name);
    if (e.kind != Entry::Kind::Vector) throw Error("not a vector: " + name);
    return e.mat.row_labels;
}

const LabeledMatrix& ModelDoc::matrix(const std::string& name) const {
    const auto& e = find(name);
    if (e.kind != Entry::Kind::Matrix) throw Error("not a matrix: " + name);
    return e.mat;
}

void ModelDoc::write(std::ostream& os) const {
    os << "cata-model v1\n";
    os << "kind " << kind << "\n";
    for (const auto& [name, e] : entries_) {
        switch (e.kind) {
            case Entry::Kind::Scalar:
                os << "scalar " << name << " " << format_double(e.scalar_value) << "\n";
                break;
            case Entry::Kind::Text:
                os << "text " << name << " " << e.text_value << "\n";
                break;
            case Entry::Kind::Vector:
                os << "vector " << name << " " << e.mat.values.rows() << "\n";
                for (Eigen::Index i = 0; i < e.mat.values.rows(); ++i)
                    os << e.mat.row_labels[static_cast<std::size_t>(i)] << "\t"
                       << format_double(e.mat.values(i, 0)) << "\n";
                break;
            case Entry::Kind::Matrix: {
                const auto& m = e.mat;
                os << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
                for (Eigen::Index j = 0; j < m.cols(); ++j)
                    os << "\t" << m.col_labels[static_cast<std::size_t>(j)];
                os << "\n";
                for (Eigen::Index i = 0; i < m.rows(); ++i) {
                    os << m.row_labels[static_cast<std::size_t>(i)];
                    for (Eigen::Index j = 0; j < m.cols(); ++j)
                        os << "\t" << format_double(m.values(i, j));
                    os << "\n";
                }
                break;
            }
        }
    }
}

namespace {
std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}
}  // namespace

ModelDoc ModelDoc::read(std::istream& is) {
    ModelDoc doc;
    std::string line;
    if (!std::getline(is, line) || line != "cata-model v1")
        throw Error("not a cata-model v1 stream");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag, name;
        ls >> tag;
        if (tag == "kind") {
            ls >> doc.kind;
        } else if (tag == "scalar") {
            double v;
            ls >> name >> v;
            doc.set_scalar(name, v);
        } else if (tag == "text") {
            ls >> name;
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            doc.set_text(name, rest);
        } else if (tag == "vector") {
            Eigen::Index n;
            ls >> name >> n;
            Eigen::VectorXd v(n);
            std::vector<std::string> labels;
            for (Eigen::Index i = 0; i < n; ++i) {
                std::string row;
                if (!std::getline(is, row)) throw Error("truncated vector: " + name);
                auto parts = split_tabs(row);
                if (parts.size() != 2) throw Error("bad vector row in " + name);
                labels.push_back(parts[0]);
                v(i) = std::stod(parts[1]);
            }
            doc.set_vector(name, v, labels);
        } else if (tag == "matrix") {
            Eigen::Index r, c;
            ls >> name >> r >> c;
            std::string header;
            if (!std::getline(is, header)) throw Error("truncated matrix: " + name);
            auto cols = split_tabs(header);
            cols.erase(cols.begin());  // leading empty cell
            if (static_cast<Eigen::Index>(cols.size()) != c)
                throw Error("bad matrix header in " + name);
            LabeledMatrix m;
            m.col_labels = cols;
            m.values.resize(r, c);
            for (Eigen::Index i = 0; i < r; ++i) {
                std::string row;
                if (!std::getline(is, row)) throw Error("truncated matrix: " + name);
                auto parts = split_tabs(row);
                if (static_cast<Eigen::Index>(parts.size()) != c + 1)
                    throw Error("bad matrix row in " + name);
                m.row_labels.push_back(parts[0]);
                for (Eigen::Index j = 0; j < c; ++j)
                    m.values(i, j) = std::stod(parts[static_cast<std::size_t>(j) + 1]);
            }
            doc.set_matrix(name, m);
        } else {
            throw Error("unknown model entry tag: " + tag);
        }
    }
    return doc;
}

void ModelDoc::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for write: " + path);
    write(os);
}

ModelDoc ModelDoc::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open for read: " + path);
    return read(is);
}

}  // namespace cata
