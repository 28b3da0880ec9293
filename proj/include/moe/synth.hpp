#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "moe/box.hpp"
#include "moe/model.hpp"

namespace moe {

enum class Regime { regime1, regime2 };

std::string to_string(Regime r);

/// Ground truth plus the covariate design used to simulate from it.
struct Scenario {
    std::string name;
    MixingMeasure truth;
    GateTransform gate;
    CovariateBox box;
    Regime regime;
};

/// Two-expert binary benchmarks on [0,1]:
///   regime1: (beta0, beta1) = (1, 3), (0, 0); (a_1, b_1) = (-1, 2), (1, -1)
///   regime2: as regime1 but the second expert is (1, 0), i.e. its slope collapses.
Scenario preset(std::string_view name, const GateTransform& gate = {});

/// n i.i.d. draws: x uniform on the box, y categorical from g_truth(. | x) by inverse CDF.
Dataset sample(const Scenario& scenario, std::size_t n, std::uint64_t seed);

} // namespace moe
