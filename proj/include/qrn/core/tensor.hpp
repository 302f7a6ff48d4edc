// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

namespace qrn {

/**
 * @brief Rank-3 real array in channel-major order.
 *
 * values[(c * height + y) * width + x] holds channel c, row y, column x.
 * Feature maps everywhere in the pipeline use this layout.
 */
struct FeatureTensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> values;

    FeatureTensor() = default;
    FeatureTensor(int c, int h, int w);  // zero filled; dims must be positive

    double& at(int c, int y, int x) {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return values[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    double* channel(int c) {
        return values.data() + static_cast<std::size_t>(c) * height * width;
    }
    const double* channel(int c) const {
        return values.data() + static_cast<std::size_t>(c) * height * width;
    }

    std::size_t size() const { return values.size(); }
    bool same_shape(const FeatureTensor& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
    bool all_finite() const;
};

}  // namespace qrn
