// SPDX-License-Identifier: Apache-2.0
#include "qrn/core/tensor.hpp"

#include <cmath>

#include "qrn/core/error.hpp"

namespace qrn {

FeatureTensor::FeatureTensor(int c, int h, int w)
    : channels(c), height(h), width(w) {
    if (c <= 0 || h <= 0 || w <= 0)
        throw ArgumentError("FeatureTensor dims must be positive");
    values.assign(static_cast<std::size_t>(c) * h * w, 0.0);
}

bool FeatureTensor::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace qrn
