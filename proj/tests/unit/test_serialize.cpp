#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pbitrc/error.hpp"
#include "pbitrc/readout.hpp"
#include "pbitrc/reservoir.hpp"
#include "pbitrc/serialize.hpp"

using namespace pbitrc;
namespace fs = std::filesystem;
using nlohmann::json;

TEST_SUITE("serialize") {

TEST_CASE("weights round-trip bit for bit through text") {
    ReservoirConfig c;
    c.size = 40;
    c.inputs = 2;
    c.outputs = 3;
    c.seed = 99;
    const WeightSet w = build_weights(c);
    const std::string text = weights_to_json(w).dump();
    const WeightSet back = weights_from_json(json::parse(text));
    CHECK(back.w_in == w.w_in);
    CHECK(back.w_fb == w.w_fb);
    CHECK(back.bias == w.bias);
    CHECK(Matrix(back.w_self) == Matrix(w.w_self));
    CHECK(back.w_self.nonZeros() == w.w_self.nonZeros());

    const json doc = json::parse(text);
    CHECK(doc["format"] == "pbitrc-weights");
    CHECK(doc["version"] == 1);
    CHECK(doc["size"] == 40);
    CHECK(doc["w_self"]["entries"].size() == static_cast<std::size_t>(w.w_self.nonZeros()));
}

TEST_CASE("readout round-trip") {
    ReadoutWeights r;
    r.layout = FeatureLayout{true, 4, false, 1};
    r.w_out = Matrix::Random(2, 5) * 1e-3;
    r.w_out(0, 0) = 0.1;
    r.lambda_used = 3.3e-7;
    const ReadoutWeights back = readout_from_json(json::parse(readout_to_json(r).dump()));
    CHECK(back.w_out == r.w_out);
    CHECK(back.layout == r.layout);
    CHECK(back.lambda_used == r.lambda_used);
}

TEST_CASE("malformed weight documents") {
    ReservoirConfig c;
    c.size = 5;
    c.density = 1.0;
    const json good = weights_to_json(build_weights(c));
    CHECK_NOTHROW(weights_from_json(good));

    json wrong_format = good;
    wrong_format["format"] = "other";
    CHECK_THROWS_AS(weights_from_json(wrong_format), DomainError);
    json wrong_version = good;
    wrong_version["version"] = 2;
    CHECK_THROWS_AS(weights_from_json(wrong_version), DomainError);
    json missing = good;
    missing.erase("bias");
    CHECK_THROWS_AS(weights_from_json(missing), DomainError);
    json short_bias = good;
    short_bias["bias"].erase(0);
    CHECK_THROWS_AS(weights_from_json(short_bias), DomainError);
    json out_of_range = good;
    out_of_range["w_self"]["entries"].push_back(json::array({7, 0, 1.0}));
    CHECK_THROWS_AS(weights_from_json(out_of_range), DomainError);
    json wrong_type = good;
    wrong_type["w_in"] = "x";
    CHECK_THROWS_AS(weights_from_json(wrong_type), DomainError);
    CHECK_THROWS_AS(readout_from_json(json::object()), DomainError);
}

TEST_CASE("csv values round-trip") {
    CsvTable t({"a", "b"});
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<double> values;
    for (int i = 0; i < 200; ++i) {
        values.push_back(u(gen) * std::pow(10.0, i % 30 - 15));
    }
    for (std::size_t i = 0; i < values.size(); i += 2) {
        t.add_row({values[i], values[i + 1]});
    }
    CHECK(t.rows() == 100);
    std::istringstream in(t.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,b");
    std::size_t k = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        for (const std::string& field : {line.substr(0, comma), line.substr(comma + 1)}) {
            double v = 0.0;
            std::from_chars(field.data(), field.data() + field.size(), v);
            CHECK(v == values[k++]);
        }
    }
    CHECK(k == values.size());
    CHECK_THROWS_AS(t.add_row({1.0}), DomainError);
}

TEST_CASE("atomic writes") {
    const fs::path dir = oracle::scratch_dir(PBITRC_TEST_SCRATCH, "atomic");
    const fs::path target = dir / "out.json";
    write_file_atomic(target, "first");
    CHECK(oracle::read_text(target) == "first");
    write_file_atomic(target, "second, longer contents");
    CHECK(oracle::read_text(target) == "second, longer contents");
    std::size_t entries = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);

    const fs::path nested = dir / "a" / "b" / "c.txt";
    write_file_atomic(nested, "x");
    CHECK(oracle::read_text(nested) == "x");

    // a directory occupying the target name makes the rename fail
    fs::create_directories(dir / "blocked");
    fs::create_directories(dir / "blocked" / "inner");
    CHECK_THROWS_AS(write_file_atomic(dir / "blocked", "y"), Error);
    std::size_t temps = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        temps += e.path().filename().string().find(".tmp") != std::string::npos ? 1 : 0;
    }
    CHECK(temps == 0);
}

}
