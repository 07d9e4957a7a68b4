#include "pbitrc/serialize.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <system_error>

#include "pbitrc/error.hpp"

namespace pbitrc {

using nlohmann::json;

namespace {

json dense_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix dense_from_json(const json& rows, Eigen::Index expected_rows, Eigen::Index expected_cols, const char* name) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != expected_rows) {
        throw DomainError(std::string("weight file: '") + name + "' must have " + std::to_string(expected_rows) +
                          " rows");
    }
    Matrix m(expected_rows, expected_cols);
    for (Eigen::Index i = 0; i < expected_rows; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != expected_cols) {
            throw DomainError(std::string("weight file: '") + name + "' row " + std::to_string(i) + " must have " +
                              std::to_string(expected_cols) + " entries");
        }
        for (Eigen::Index j = 0; j < expected_cols; ++j) {
            m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
        }
    }
    return m;
}

const json& member(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw DomainError(std::string("weight file: missing '") + key + "'");
    }
    return doc.at(key);
}

} // namespace

json weights_to_json(const WeightSet& w) {
    json entries = json::array();
    for (int k = 0; k < w.w_self.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(w.w_self, k); it; ++it) {
            entries.push_back(json::array({it.row(), it.col(), it.value()}));
        }
    }
    json bias = json::array();
    for (Eigen::Index i = 0; i < w.bias.size(); ++i) {
        bias.push_back(w.bias[i]);
    }
    return json{{"format", "pbitrc-weights"},
                {"version", 1},
                {"size", w.w_self.rows()},
                {"inputs", w.w_in.cols()},
                {"outputs", w.w_fb.cols()},
                {"w_in", dense_to_json(w.w_in)},
                {"w_fb", dense_to_json(w.w_fb)},
                {"bias", std::move(bias)},
                {"w_self", {{"rows", w.w_self.rows()}, {"cols", w.w_self.cols()}, {"entries", std::move(entries)}}}};
}

WeightSet weights_from_json(const json& doc) {
    try {
        if (member(doc, "format") != "pbitrc-weights" || member(doc, "version") != 1) {
            throw DomainError("weight file: unsupported format or version");
        }
        const auto n = member(doc, "size").get<Eigen::Index>();
        const auto nu = member(doc, "inputs").get<Eigen::Index>();
        const auto ny = member(doc, "outputs").get<Eigen::Index>();
        if (n < 1 || nu < 1 || ny < 1) {
            throw DomainError("weight file: dimensions must be positive");
        }
        WeightSet w;
        w.w_in = dense_from_json(member(doc, "w_in"), n, nu, "w_in");
        w.w_fb = dense_from_json(member(doc, "w_fb"), n, ny, "w_fb");
        const json& bias = member(doc, "bias");
        if (!bias.is_array() || static_cast<Eigen::Index>(bias.size()) != n) {
            throw DomainError("weight file: 'bias' must have " + std::to_string(n) + " entries");
        }
        w.bias.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            w.bias[i] = bias[static_cast<std::size_t>(i)].get<double>();
        }
        const json& self = member(doc, "w_self");
        if (member(self, "rows").get<Eigen::Index>() != n || member(self, "cols").get<Eigen::Index>() != n) {
            throw DomainError("weight file: 'w_self' must be N x N");
        }
        std::vector<Eigen::Triplet<double>> triplets;
        for (const json& e : member(self, "entries")) {
            const auto i = e.at(0).get<Eigen::Index>();
            const auto j = e.at(1).get<Eigen::Index>();
            if (i < 0 || i >= n || j < 0 || j >= n) {
                throw DomainError("weight file: 'w_self' entry index out of range");
            }
            triplets.emplace_back(i, j, e.at(2).get<double>());
        }
        w.w_self.resize(n, n);
        w.w_self.setFromTriplets(triplets.begin(), triplets.end());
        w.w_self.makeCompressed();
        return w;
    } catch (const json::exception& e) {
        throw DomainError(std::string("weight file: ") + e.what());
    }
}

json readout_to_json(const ReadoutWeights& r) {
    return json{{"bias", r.layout.bias},
                {"nodes", r.layout.nodes},
                {"input", r.layout.input},
                {"inputs", r.layout.inputs},
                {"lambda_used", r.lambda_used},
                {"w_out", dense_to_json(r.w_out)}};
}

ReadoutWeights readout_from_json(const json& doc) {
    try {
        ReadoutWeights r;
        r.layout.bias = member(doc, "bias").get<bool>();
        r.layout.nodes = member(doc, "nodes").get<std::size_t>();
        r.layout.input = member(doc, "input").get<bool>();
        r.layout.inputs = member(doc, "inputs").get<std::size_t>();
        r.lambda_used = member(doc, "lambda_used").get<double>();
        const json& rows = member(doc, "w_out");
        if (!rows.is_array() || rows.empty()) {
            throw DomainError("readout: 'w_out' must be a non-empty array");
        }
        r.w_out = dense_from_json(rows, static_cast<Eigen::Index>(rows.size()),
                                  static_cast<Eigen::Index>(r.layout.width()), "w_out");
        return r;
    } catch (const json::exception& e) {
        throw DomainError(std::string("readout: ") + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    std::random_device rd;
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            throw Error("failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        body_ += (i ? "," : "") + header[i];
    }
    body_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_) {
        throw DomainError("CSV row has " + std::to_string(values.size()) + " values, expected " +
                          std::to_string(columns_));
    }
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            body_ += ',';
        }
        const auto res = std::to_chars(buf, buf + sizeof buf, values[i]);
        body_.append(buf, res.ptr);
    }
    body_ += '\n';
    ++rows_;
}

std::string CsvTable::str() const { return body_; }

} // namespace pbitrc
