#include "eqvar/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace eqvar {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    return in;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void write_data_csv(const std::string& path, const Matrix& x, bool header) {
    std::ofstream out = open_out(path);
    if (header) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            out << 'x' << (j + 1);
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j) out << ',';
            out << fmt_double(x(i, j));
        }
        out << '\n';
    }
    if (!out) throw Error("write failed: " + path);
}

Matrix read_data_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (first) {
            first = false;
            // tolerate a header row of column names
            bool numeric = true;
            try {
                std::size_t used = 0;
                std::stod(fields[0], &used);
                if (used != fields[0].size()) numeric = false;
            } catch (...) {
                numeric = false;
            }
            if (!numeric) continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) row.push_back(std::stod(f));
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error("ragged csv row in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("no data rows in " + path);
    Matrix x(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            x(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    return x;
}

void write_edge_csv(const std::string& path, const Matrix& adjacency) {
    std::ofstream out = open_out(path);
    out << "src,dst,weight\n";
    const Eigen::Index p = adjacency.rows();
    for (Eigen::Index src = 0; src < p; ++src) {
        for (Eigen::Index dst = 0; dst < p; ++dst) {
            const double w = adjacency(dst, src);
            if (w != 0.0) out << (src + 1) << ',' << (dst + 1) << ',' << fmt_double(w) << '\n';
        }
    }
    if (!out) throw Error("write failed: " + path);
}

Matrix read_edge_csv(const std::string& path, int p) {
    std::ifstream in = open_in(path);
    Matrix adjacency = Matrix::Zero(p, p);
    std::string line;
    if (!std::getline(in, line)) throw Error("missing header in " + path);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 3) throw Error("malformed edge row in " + path);
        const int src = std::stoi(fields[0]) - 1;
        const int dst = std::stoi(fields[1]) - 1;
        if (src < 0 || src >= p || dst < 0 || dst >= p)
            throw Error("edge index out of range in " + path);
        adjacency(dst, src) = std::stod(fields[2]);
    }
    return adjacency;
}

void write_model_json(const std::string& path, const SemModel& model) {
    json err;
    err["kind"] = model.errors().kind == ErrorKind::Gaussian ? "gaussian" : "rademacher";
    err["sigma2"] = model.errors().sigma2;
    err["gamma2"] = model.errors().gamma2();
    json j;
    j["p"] = model.p();
    j["sigma2"] = model.sigma2();
    j["error"] = err;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

SemModel read_model(const std::string& json_path, const std::string& edges_path) {
    std::ifstream in = open_in(json_path);
    json j;
    in >> j;
    const int p = j.at("p").get<int>();
    const double sigma2 = j.at("sigma2").get<double>();
    const std::string kind = j.at("error").at("kind").get<std::string>();
    ErrorSpec spec = kind == "rademacher" ? ErrorSpec::rademacher(sigma2)
                                          : ErrorSpec::gaussian(sigma2);
    Matrix b = read_edge_csv(edges_path, p);
    return SemModel(WeightedDag(std::move(b)), spec);
}

void write_ordering_json(const std::string& path, const Ordering& ordering) {
    json j;
    j["sequence"] = json::array();
    for (int v : ordering.sequence) j["sequence"].push_back(v + 1);
    j["step_criteria"] = ordering.step_criteria;
    j["step_subsets"] = json::array();
    for (const auto& subset : ordering.step_subsets) {
        json s = json::array();
        for (int v : subset) s.push_back(v + 1);
        j["step_subsets"].push_back(std::move(s));
    }
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed: " + path);
}

Ordering read_ordering_json(const std::string& path) {
    std::ifstream in = open_in(path);
    json j;
    in >> j;
    Ordering out;
    for (const auto& v : j.at("sequence")) out.sequence.push_back(v.get<int>() - 1);
    for (const auto& v : j.at("step_criteria")) out.step_criteria.push_back(v.get<double>());
    for (const auto& s : j.at("step_subsets")) {
        std::vector<int> subset;
        for (const auto& v : s) subset.push_back(v.get<int>() - 1);
        out.step_subsets.push_back(std::move(subset));
    }
    return out;
}

}  // namespace eqvar
