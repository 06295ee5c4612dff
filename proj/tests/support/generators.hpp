#pragma once

// Hand-rolled random instances for property tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "scada_ids/forest.hpp"

namespace gen {

/// Small split-search instance: up to `max_rows` rows, `features` columns of
/// small integers (so ties and repeated values are common), 2-4 labels.
inline scada_ids::Samples small_instance(std::mt19937_64& g, std::size_t max_rows = 20, std::size_t features = 3) {
    std::uniform_int_distribution<std::size_t> rows_d(1, max_rows);
    std::uniform_int_distribution<int> labels_d(2, 4);
    const std::size_t rows = rows_d(g);
    const int labels = labels_d(g);
    std::uniform_int_distribution<int> value_d(0, 6);
    std::uniform_int_distribution<int> label_d(0, labels - 1);
    scada_ids::Samples s(features);
    std::vector<double> x(features);
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& v : x) {
            v = value_d(g) * 0.5;
        }
        s.push_back(x, label_d(g));
    }
    return s;
}

/// Consistent data: identical feature vectors always carry the same label.
inline scada_ids::Samples consistent_instance(std::mt19937_64& g, std::size_t rows, std::size_t features) {
    std::uniform_real_distribution<double> value_d(-10.0, 10.0);
    scada_ids::Samples s(features);
    std::vector<double> x(features);
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& v : x) {
            v = value_d(g);
        }
        const int label = (x[0] > 0 ? 1 : 0) + (x[1] * x[0] > 3 ? 2 : 0);
        s.push_back(x, label);
    }
    return s;
}

} // namespace gen
