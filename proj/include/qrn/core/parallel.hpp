// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace qrn {

/// Worker count for per-image parallel sections. Honors the QRN_THREADS
/// environment variable; defaults to the hardware concurrency.
int worker_count();

/// Runs fn(i) for i in [0, n). Work items must be independent; callers get
/// determinism by writing results into index i of a pre-sized container.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace qrn
