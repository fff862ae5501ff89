#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cata/brick.hpp"

namespace cata {

// Expected header names for the long-format input. Defaults match the
// documented format: participant,group,excerpt,variable,level,value.
struct ResponseSchema {
    std::string participant = "participant";
    std::string group = "group";
    std::string excerpt = "excerpt";
    std::string variable = "variable";
    std::string level = "level";
    std::string value = "value";
    char delimiter = ',';
};

// Optional label translation (e.g. French -> English) applied while parsing.
using LabelTranslation = std::map<std::string, std::string>;

// Parse a long-format survey export into a brick. Label order is
// first-appearance; the presence mask is derived from which
// (participant, excerpt) pairs occur in the file at all.
ResponseBrick parse_responses(std::istream& input, const ResponseSchema& schema = {},
                              const LabelTranslation& translation = {});
ResponseBrick parse_responses_file(const std::string& path, const ResponseSchema& schema = {},
                                   const LabelTranslation& translation = {});

// Load a "from\tto" translation table, one pair per line.
LabelTranslation load_translation(const std::string& path);

struct RecodeReport {
    // mass removed by OR-capping when a participant checked several levels
    // that merged into one column
    double cap_reduction = 0.0;
};

// Apply collapse / barycentric recoding rules in order.
ResponseBrick apply_recoding(const ResponseBrick& brick, const RecodeSpec& spec,
                             RecodeReport* report = nullptr);

// Parse the JSON recode-spec format (see README).
RecodeSpec parse_recode_spec(const std::string& json_text);
RecodeSpec load_recode_spec(const std::string& path);

// Sum the brick across participants into an excerpts x levels table.
ContingencyTable sum_to_contingency(const ResponseBrick& brick);

struct SparseDropReport {
    std::vector<std::string> removed_columns;
    double threshold = 1.0;
};

// Remove columns whose sum is <= threshold; reports what was removed.
ContingencyTable drop_sparse_levels(const ContingencyTable& table, double threshold,
                                    SparseDropReport* report = nullptr);

// Common-choice counts between participants, restricted to excerpts
// presented to both. `normalize` divides each pair count by the number of
// shared excerpts.
CoOccurrenceMatrix co_occurrence(const ResponseBrick& brick, bool normalize = false);

// One brick per distinct group label; excerpt/level registries shared.
std::vector<ResponseBrick> split_by_group(const ResponseBrick& brick);

// Labeled-table text serialization (shared across CLI stages).
void save_table(const ContingencyTable& table, const std::string& path);
ContingencyTable load_table(const std::string& path);
void save_cooccurrence(const CoOccurrenceMatrix& m, const std::string& path);
CoOccurrenceMatrix load_cooccurrence(const std::string& path);

}  // namespace cata
