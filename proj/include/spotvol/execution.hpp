#pragma once

namespace spotvol {

/// Selects the OpenMP kernel or the serial reference path. Parallel kernels
/// produce bit-identical results for any thread count.
enum class Execution { serial, parallel };

}  // namespace spotvol
