#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cata/labeled_matrix.hpp"

namespace cata {

// Plain-text model container. Layout:
//
//   cata-model v1
//   kind <word>
//   scalar <name> <value>
//   text <name> <single line, may contain spaces>
//   vector <name> <n>
//   <label>\t<value>          (n lines)
//   matrix <name> <rows> <cols>
//   \t<collabel>\t...          (header line)
//   <rowlabel>\t<v>\t...       (rows lines)
//
// Numbers are written with 17 significant digits so doubles round-trip
// exactly.
class ModelDoc {
public:
    std::string kind;

    void set_scalar(const std::string& name, double v);
    void set_text(const std::string& name, const std::string& v);
    void set_vector(const std::string& name, const Eigen::VectorXd& v,
                    const std::vector<std::string>& labels = {});
    void set_matrix(const std::string& name, const LabeledMatrix& m);
    void set_matrix(const std::string& name, const Eigen::MatrixXd& m,
                    const std::vector<std::string>& row_labels = {},
                    const std::vector<std::string>& col_labels = {});

    bool has(const std::string& name) const;
    double scalar(const std::string& name) const;
    std::string text(const std::string& name) const;
    Eigen::VectorXd vector(const std::string& name) const;
    std::vector<std::string> vector_labels(const std::string& name) const;
    const LabeledMatrix& matrix(const std::string& name) const;

    void write(std::ostream& os) const;
    static ModelDoc read(std::istream& is);

    void save(const std::string& path) const;
    static ModelDoc load(const std::string& path);

private:
    struct Entry {
        enum class Kind { Scalar, Text, Vector, Matrix } kind;
        double scalar_value = 0.0;
        std::string text_value;
        LabeledMatrix mat;  // vectors stored as n x 1
    };
    std::vector<std::pair<std::string, Entry>> entries_;
    const Entry& find(const std::string& name) const;
    Entry& upsert(const std::string& name, Entry::Kind kind);
};

// 17-significant-digit formatting used across every serialized artifact.
std::string format_double(double v);

}  // namespace cata
