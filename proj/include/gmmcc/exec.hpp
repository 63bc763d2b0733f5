#pragma once

namespace gmmcc {

// Execution policy for the data-parallel kernels. Serial is the reference
// path kept for testing; Parallel uses OpenMP when available. Both must
// produce identical results (reductions are order-independent by design).
enum class Exec { Serial, Parallel };

}
