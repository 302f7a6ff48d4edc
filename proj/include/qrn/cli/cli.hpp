// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace qrn::cli {

/// Entry point of the qrn command line tool. Exit codes: 0 success, 2 usage,
/// 3 divergence during training, 4 I/O or format error, 5 model/dataset
/// incompatibility.
int run_cli(int argc, const char* const* argv);

}  // namespace qrn::cli
