#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>

#include "moe/errors.hpp"
#include "moe/model_io.hpp"
#include "moe/synth.hpp"
#include "support.hpp"

using namespace moe;

TEST_CASE("mixing-measure JSON round-trips bit for bit")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 3;
        const int K = 2 + trial % 3;
        const MixingMeasure G = moe::testing::random_measure(rng, d, K, 1 + trial % 4, 3.0,
                                                             trial % 2 ? GateTransform::power(3) : GateTransform::sin());
        const std::string text = to_json(G).dump();
        const MixingMeasure back = measure_from_json(nlohmann::json::parse(text));
        CHECK(back == G);
        CHECK(back.gate() == G.gate());
    }
}

TEST_CASE("mixing-measure JSON layout")
{
    const nlohmann::json j = to_json(preset("regime2").truth);
    CHECK(j.at("d") == 1);
    CHECK(j.at("K") == 2);
    CHECK(j.at("canonical") == true);
    CHECK(j.at("gate_transform") == "identity");
    CHECK(j.at("components").size() == 2);
    CHECK(j.at("components")[0].at("b").size() == 1);
    CHECK(j.at("components")[0].at("b")[0].size() == 2);
    CHECK(j.at("components")[0].at("beta0") == 1.0);
}

TEST_CASE("malformed measure JSON is a contract violation")
{
    CHECK_THROWS_AS(measure_from_json(nlohmann::json::parse(R"({"d": 1})")), ContractViolation);
    nlohmann::json j = to_json(preset("regime1").truth);
    j["components"][0]["b"] = nlohmann::json::array({nlohmann::json::array({1.0})});
    CHECK_THROWS_AS(measure_from_json(j), ContractViolation);
}

TEST_CASE("dataset CSV round trip and one-based labels")
{
    const Dataset D = sample(preset("regime1"), 50, 4);
    const std::string csv = dataset_to_csv(D);
    CHECK(csv.rfind("x1,y\n", 0) == 0);
    CHECK(csv.find(",0\n") == std::string::npos);
    CHECK(dataset_from_csv(csv, 2) == D);
    CHECK(dataset_from_csv(csv, 0) == D);

    CHECK_THROWS_AS(dataset_from_csv("x1,y\n0.5,0\n", 2), ContractViolation);
    CHECK_THROWS_AS(dataset_from_csv("x1,y\n0.5,3\n", 2), ContractViolation);
    CHECK_THROWS_AS(dataset_from_csv("x1,y\n0.5\n", 2), ContractViolation);
    CHECK_THROWS_AS(dataset_from_csv("a,b\n0.5,1\n", 2), ContractViolation);
}

TEST_CASE("format_double is the shortest round-trip form")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5, 30000.0}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(30000.0) == "30000");
}

TEST_CASE("file helpers report the path on failure")
{
    const std::filesystem::path missing = "/nonexistent-dir/for-sure/file.txt";
    try {
        read_text_file(missing);
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(missing.string()) != std::string::npos);
    }
    CHECK_THROWS_AS(write_text_file(missing, "x"), IoError);

    const auto tmp = std::filesystem::temp_directory_path() / "moe_io_roundtrip.txt";
    write_text_file(tmp, "hello\n");
    CHECK(read_text_file(tmp) == "hello\n");
    std::filesystem::remove(tmp);
}
