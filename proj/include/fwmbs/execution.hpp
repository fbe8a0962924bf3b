#pragma once

namespace fwmbs {

/// Selects the serial reference loop or the OpenMP loop for data-parallel
/// kernels. Both paths perform identical per-element arithmetic, so results
/// are bit-identical regardless of the choice or the thread count.
enum class Execution { Serial, Parallel };

}  // namespace fwmbs
