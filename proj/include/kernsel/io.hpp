#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kernsel/dataset.hpp"
#include "kernsel/solver.hpp"

namespace kernsel {

// Features CSV: header row of names, then one numeric row per observation.
// Throws ParseError naming the file, row, and column on any bad or
// non-finite cell.
std::pair<std::vector<std::string>, Matrix> read_features_csv(const std::string& path);

// Labels CSV: a single column with an optional header line (any first line
// that does not parse as a number is treated as the name).
Vector read_labels_csv(const std::string& path);

// Loads features + labels into a Dataset. Classification labels may be
// coded {-1,+1} or {0,1} (0 becomes -1); anything else is a LabelError.
// A row-count mismatch is a ShapeError. With standardize set, each feature
// is shifted/scaled to mean 0, sample sd 1 (divisor n-1); constant columns
// keep scale 1 and warn on stderr; the applied map is stored on the result.
Dataset read_dataset(const std::string& features_path, const std::string& labels_path, Task task,
                     bool standardize);

// Writes a features CSV in the schema read_features_csv expects. Reals are
// written as shortest round-trip decimals, so identical inputs produce
// byte-identical files.
void write_features_csv(const std::string& path, const std::vector<std::string>& names,
                        const Matrix& X);

void write_labels_csv(const std::string& path, const std::string& name, const Vector& y);

// Regression: one "prediction" column. Classification: "score,label" with
// label = sign(score), sign(0) -> +1.
void write_predictions_csv(const std::string& path, Task task, const Vector& scores);

// Model persistence as versioned JSON with every real encoded as a
// hex-float string, making save -> load -> predict bit-identical.
// load_model throws SchemaError on a version mismatch and ParseError on
// anything malformed; it never returns a partial model.
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

} // namespace kernsel
