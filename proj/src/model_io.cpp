#include "moe/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "moe/errors.hpp"

namespace moe {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

nlohmann::json to_json(const MixingMeasure& G)
{
    nlohmann::json comps = nlohmann::json::array();
    for (const Component& c : G.components()) {
        nlohmann::json b = nlohmann::json::array();
        for (int r = 0; r < G.dim(); ++r) {
            std::vector<double> row(c.b.cols());
            for (Eigen::Index s = 0; s < c.b.cols(); ++s) row[s] = c.b(r, s);
            b.push_back(row);
        }
        comps.push_back({{"beta0", c.beta0},
                         {"beta1", std::vector<double>(c.beta1.data(), c.beta1.data() + c.beta1.size())},
                         {"a", std::vector<double>(c.a.data(), c.a.data() + c.a.size())},
                         {"b", b}});
    }
    return {{"d", G.dim()},
            {"K", G.classes()},
            {"canonical", G.canonical()},
            {"gate_transform", G.gate().name()},
            {"components", comps}};
}

MixingMeasure measure_from_json(const nlohmann::json& j)
{
    try {
        const int d = j.at("d").get<int>();
        const int K = j.at("K").get<int>();
        std::vector<Component> comps;
        for (const auto& jc : j.at("components")) {
            const auto beta1 = jc.at("beta1").get<std::vector<double>>();
            const auto a = jc.at("a").get<std::vector<double>>();
            const auto b = jc.at("b").get<std::vector<std::vector<double>>>();
            MOE_REQUIRE(static_cast<int>(b.size()) == d, "b must have d rows");
            Component c;
            c.beta0 = jc.at("beta0").get<double>();
            c.beta1 = Eigen::Map<const Eigen::VectorXd>(beta1.data(), static_cast<Eigen::Index>(beta1.size()));
            c.a = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
            c.b.resize(d, K);
            for (int r = 0; r < d; ++r) {
                MOE_REQUIRE(static_cast<int>(b[r].size()) == K, "each row of b must have K entries");
                for (int s = 0; s < K; ++s) c.b(r, s) = b[r][s];
            }
            comps.push_back(std::move(c));
        }
        const GateTransform gate = GateTransform::parse(j.value("gate_transform", std::string("identity")));
        return MixingMeasure(d, K, std::move(comps), j.at("canonical").get<bool>(), gate);
    } catch (const nlohmann::json::exception& e) {
        throw ContractViolation(std::string("malformed mixing-measure JSON: ") + e.what());
    }
}

std::string dataset_to_csv(const Dataset& D)
{
    std::string out;
    for (int j = 0; j < D.dim(); ++j) out += "x" + std::to_string(j + 1) + ",";
    out += "y\n";
    for (std::size_t t = 0; t < D.size(); ++t) {
        for (int j = 0; j < D.dim(); ++j) {
            out += format_double(D.x()(static_cast<Eigen::Index>(t), j));
            out += ',';
        }
        out += std::to_string(D.labels()[t] + 1);
        out += '\n';
    }
    return out;
}

Dataset dataset_from_csv(const std::string& text, int K)
{
    std::istringstream in(text);
    std::string line;
    MOE_REQUIRE(static_cast<bool>(std::getline(in, line)), "dataset CSV is empty");
    int cols = 1;
    for (char ch : line) cols += ch == ',';
    const int d = cols - 1;
    MOE_REQUIRE(d >= 1, "dataset CSV header must be x1,...,xd,y");
    for (int j = 0; j < d; ++j) {
        const std::string expect = "x" + std::to_string(j + 1);
        MOE_REQUIRE(line.find(expect) != std::string::npos, "dataset CSV header must be x1,...,xd,y");
    }

    std::vector<double> values;
    std::vector<int> labels;
    int max_label = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::istringstream row(line);
        std::string cell;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            if (col < d) {
                double v = 0.0;
                const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                MOE_REQUIRE(res.ec == std::errc(), "bad covariate value '" + cell + "'");
                values.push_back(v);
            } else {
                const int y = std::stoi(cell);
                MOE_REQUIRE(y >= 1, "labels are one-based");
                labels.push_back(y - 1);
                max_label = std::max(max_label, y);
            }
            ++col;
        }
        MOE_REQUIRE(col == cols, "dataset CSV row has the wrong number of fields");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index t = 0; t < n; ++t)
        for (int j = 0; j < d; ++j) x(t, j) = values[static_cast<std::size_t>(t * d + j)];
    return Dataset(std::move(x), std::move(labels), K > 0 ? K : std::max(max_label, 2));
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace moe
