#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"

namespace pbitrc {

/// Weight file layout (format tag "pbitrc-weights", version 1):
///
///   {
///     "format": "pbitrc-weights", "version": 1,
///     "size": N, "inputs": n_u, "outputs": n_y,
///     "w_in":   [[...n_u...] x N],          row-major dense
///     "w_fb":   [[...n_y...] x N],
///     "bias":   [...N...],
///     "w_self": {"rows": N, "cols": N, "entries": [[i, j, value], ...]},
///     "readout": {"bias": bool, "nodes": N, "input": bool, "inputs": n_u,
///                 "lambda_used": l, "w_out": [[...F...] x n_y]}      optional
///   }
///
/// Doubles are written in shortest round-trip form, so load(save(w)) == w bit for bit.
nlohmann::json weights_to_json(const WeightSet& weights);
WeightSet weights_from_json(const nlohmann::json& doc);

nlohmann::json readout_to_json(const ReadoutWeights& readout);
ReadoutWeights readout_from_json(const nlohmann::json& doc);

/// Write `contents` to `path` through a temporary file in the same directory
/// followed by a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Small CSV builder; values are written in shortest round-trip form.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    std::string str() const;
    std::size_t rows() const noexcept { return rows_; }

  private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string body_;
};

} // namespace pbitrc
