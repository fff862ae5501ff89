#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cata {

// Configuration for a full experiment run, loaded from JSON (see README).
struct RunConfig {
    std::string experiment;  // qualities | adjectives | combined
    std::string responses;   // long-format survey export (qualities/adjectives)
    std::string recode_spec; // optional JSON recode program
    std::string translation; // optional label translation table
    std::string table_x;     // combined mode: serialized tables
    std::string table_y;
    double drop_threshold = 1.0;
    std::size_t clusters = 4;
    std::size_t replicates = 500;
    std::uint64_t seed = 0;
    double coverage = 0.95;
    double alpha = 0.05;
    unsigned threads = 1;
    bool normalize_cooccurrence = false;
    std::vector<std::string> holdout_rows;  // re-projected as supplementary
    std::string out_dir = "out";

    static RunConfig from_json_file(const std::string& path);
    void validate() const;
};

struct ManifestEntry {
    std::string path;     // relative to out_dir
    std::string hash;     // fnv1a-64 of the file bytes, hex
};

struct Manifest {
    std::vector<ManifestEntry> files;
    std::string to_json() const;
};

// Run the configured experiment end to end; every artifact is listed in the
// returned manifest, which is also written to <out_dir>/manifest.json.
Manifest run_pipeline(const RunConfig& config);

// Standalone figure regeneration from serialized models.
struct FigureSpec {
    std::string kind;        // scree | factor-map | contribution-bars |
                             // mfa-partial-map | mds-ellipse-map | latent-pair-map
    std::string model_path;  // serialized model the figure is drawn from
    std::string aux_path;    // resample/cluster file, when the kind needs one
    std::string side = "row";
    int dimension = 0;       // zero-based, for contribution/latent figures
    std::string title;
};

std::string render_figure(const FigureSpec& spec);

// FNV-1a 64-bit content hash used by the manifest.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::string& path);

}  // namespace cata
