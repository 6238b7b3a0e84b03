#include "kernsel/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "kernsel/errors.hpp"

namespace kernsel {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(trimmed(line.substr(start)));
            return cells;
        }
        cells.push_back(trimmed(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool parse_real(const std::string& cell, double& out) {
    if (cell.empty()) return false;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t row,
                  std::size_t col) {
    double v = 0.0;
    auto where = [&]() {
        std::ostringstream os;
        os << path << ": row " << row << ", column " << col;
        return os.str();
    };
    if (!parse_real(cell, v)) throw ParseError(where() + ": cannot parse '" + cell + "' as a number");
    if (!std::isfinite(v)) throw ParseError(where() + ": non-finite value '" + cell + "'");
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (trimmed(line).empty()) continue;
        lines.push_back(line);
    }
    return lines;
}

std::string encode_real(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

double decode_real(const json& node) {
    if (!node.is_string()) throw ParseError("model file: expected a hex-float string");
    const std::string s = node.get<std::string>();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ParseError("model file: bad real encoding '" + s + "'");
    return v;
}

json encode_vector(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(encode_real(v[i]));
    return arr;
}

Vector decode_vector(const json& arr) {
    if (!arr.is_array()) throw ParseError("model file: expected an array of reals");
    Vector v(static_cast<Eigen::Index>(arr.size()));
    Eigen::Index i = 0;
    for (const auto& node : arr) v[i++] = decode_real(node);
    return v;
}

void format_real(std::ostream& os, double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    os.write(buf, res.ptr - buf);
}

} // namespace

std::pair<std::vector<std::string>, Matrix> read_features_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty file, expected a header row");
    const std::vector<std::string> names = split_csv_line(lines[0]);
    if (names.empty() || names[0].empty())
        throw ParseError(path + ": header row has no feature names");
    const auto p = names.size();
    const auto n = lines.size() - 1;
    Matrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
        const std::vector<std::string> cells = split_csv_line(lines[r + 1]);
        if (cells.size() != p) {
            std::ostringstream os;
            os << path << ": row " << (r + 1) << " has " << cells.size() << " cells, expected "
               << p;
            throw ParseError(os.str());
        }
        for (std::size_t c = 0; c < p; ++c)
            X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_cell(cells[c], path, r + 1, c + 1);
    }
    return {names, X};
}

Vector read_labels_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty labels file");
    std::size_t first = 0;
    double probe = 0.0;
    if (!parse_real(trimmed(lines[0]), probe)) first = 1; // named column
    const std::size_t n = lines.size() - first;
    Vector y(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const std::string cell = trimmed(lines[first + r]);
        if (cell.find(',') != std::string::npos)
            throw ParseError(path + ": labels must be a single column");
        y[static_cast<Eigen::Index>(r)] = parse_cell(cell, path, r + 1, 1);
    }
    return y;
}

Dataset read_dataset(const std::string& features_path, const std::string& labels_path, Task task,
                     bool standardize) {
    Dataset data;
    data.task = task;
    std::tie(data.feature_names, data.X) = read_features_csv(features_path);
    data.y = read_labels_csv(labels_path);
    if (data.y.size() != data.X.rows()) {
        std::ostringstream os;
        os << "feature rows (" << data.X.rows() << ") and labels (" << data.y.size()
           << ") disagree";
        throw ShapeError(os.str());
    }

    if (task == Task::Classification) {
        bool has_zero = false, has_neg = false;
        for (Eigen::Index j = 0; j < data.y.size(); ++j) {
            const double v = data.y[j];
            if (v == 0.0)
                has_zero = true;
            else if (v == -1.0)
                has_neg = true;
            else if (v != 1.0)
                throw LabelError(labels_path + ": classification labels must be -1/+1 or 0/1");
        }
        if (has_zero && has_neg)
            throw LabelError(labels_path + ": labels mix the 0/1 and -1/+1 codings");
        if (has_zero)
            for (Eigen::Index j = 0; j < data.y.size(); ++j)
                if (data.y[j] == 0.0) data.y[j] = -1.0;
    }

    if (standardize) {
        const auto n = data.X.rows();
        const auto p = data.X.cols();
        data.standardization.mean.resize(p);
        data.standardization.scale.resize(p);
        for (Eigen::Index m = 0; m < p; ++m) {
            const double mean = n > 0 ? data.X.col(m).mean() : 0.0;
            double sd = 0.0;
            if (n > 1)
                sd = std::sqrt((data.X.col(m).array() - mean).square().sum() /
                               static_cast<double>(n - 1));
            if (sd == 0.0) {
                std::cerr << "warning: feature '" << data.feature_names[static_cast<std::size_t>(m)]
                          << "' is constant; leaving its scale at 1\n";
                sd = 1.0;
            }
            data.standardization.mean[m] = mean;
            data.standardization.scale[m] = sd;
            data.X.col(m) = (data.X.col(m).array() - mean) / sd;
        }
    }
    return data;
}

void write_features_csv(const std::string& path, const std::vector<std::string>& names,
                        const Matrix& X) {
    if (static_cast<Eigen::Index>(names.size()) != X.cols())
        throw DimensionMismatch("write_features_csv: name count does not match columns");
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c) out << ',';
        out << names[c];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (j) out << ',';
            format_real(out, X(i, j));
        }
        out << '\n';
    }
    if (!out) throw ParseError("failed writing " + path);
}

void write_labels_csv(const std::string& path, const std::string& name, const Vector& y) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << name << '\n';
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        format_real(out, y[i]);
        out << '\n';
    }
    if (!out) throw ParseError("failed writing " + path);
}

void write_predictions_csv(const std::string& path, Task task, const Vector& scores) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    if (task == Task::Regression) {
        out << "prediction\n";
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            format_real(out, scores[i]);
            out << '\n';
        }
    } else {
        out << "score,label\n";
        for (Eigen::Index i = 0; i < scores.size(); ++i) {
            format_real(out, scores[i]);
            out << (scores[i] >= 0.0 ? ",1\n" : ",-1\n");
        }
    }
    if (!out) throw ParseError("failed writing " + path);
}

void save_model(const FittedModel& model, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    j["task"] = model.task == Task::Regression ? "regression" : "classification";
    j["sigma"] = encode_real(model.spec.sigma);
    j["bound"] = encode_real(model.spec.bound);
    j["y_center"] = encode_real(model.y_center);
    j["lambda"] = encode_vector(model.spec.lambda);
    j["alpha"] = encode_vector(model.alpha);

    json tx;
    tx["rows"] = model.train_X.rows();
    tx["cols"] = model.train_X.cols();
    json data = json::array();
    for (Eigen::Index i = 0; i < model.train_X.rows(); ++i)
        for (Eigen::Index c = 0; c < model.train_X.cols(); ++c)
            data.push_back(encode_real(model.train_X(i, c)));
    tx["data"] = std::move(data);
    j["train_x"] = std::move(tx);

    if (model.standardization.active()) {
        json st;
        st["mean"] = encode_vector(model.standardization.mean);
        st["scale"] = encode_vector(model.standardization.scale);
        j["standardization"] = std::move(st);
    } else {
        j["standardization"] = nullptr;
    }

    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw ParseError("failed writing " + path);
}

FittedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    try {
        if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
            throw SchemaError(path + ": missing schema_version");
        if (j["schema_version"].get<int>() != 1)
            throw SchemaError(path + ": unsupported schema_version " +
                              j["schema_version"].dump());

        FittedModel model;
        const std::string task = j.at("task").get<std::string>();
        if (task == "regression")
            model.task = Task::Regression;
        else if (task == "classification")
            model.task = Task::Classification;
        else
            throw ParseError(path + ": unknown task '" + task + "'");

        model.spec.sigma = decode_real(j.at("sigma"));
        model.spec.bound = decode_real(j.at("bound"));
        model.y_center = decode_real(j.at("y_center"));
        model.spec.lambda = decode_vector(j.at("lambda"));
        model.alpha = decode_vector(j.at("alpha"));

        const json& tx = j.at("train_x");
        const auto rows = tx.at("rows").get<Eigen::Index>();
        const auto cols = tx.at("cols").get<Eigen::Index>();
        const json& cells = tx.at("data");
        if (rows < 0 || cols < 0 ||
            cells.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
            throw ParseError(path + ": training matrix shape does not match its data");
        model.train_X.resize(rows, cols);
        std::size_t k = 0;
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index c = 0; c < cols; ++c) model.train_X(i, c) = decode_real(cells[k++]);

        if (model.alpha.size() != rows)
            throw ParseError(path + ": alpha length does not match the training rows");
        if (model.spec.lambda.size() != cols)
            throw ParseError(path + ": lambda length does not match the training columns");
        if (!(model.spec.sigma > 0.0) || !std::isfinite(model.spec.sigma))
            throw ParseError(path + ": bandwidth must be positive and finite");

        const json& st = j.at("standardization");
        if (!st.is_null()) {
            model.standardization.mean = decode_vector(st.at("mean"));
            model.standardization.scale = decode_vector(st.at("scale"));
            if (model.standardization.mean.size() != cols ||
                model.standardization.scale.size() != cols)
                throw ParseError(path + ": standardization length does not match columns");
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace kernsel
