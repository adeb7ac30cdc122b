#pragma once

// Every data-parallel kernel has an OpenMP path and a serial reference path.
// Both produce bit-identical output: parallel loops only write disjoint slots
// and any reduction is done afterwards in index order.

namespace golazo {

enum class Exec { serial, parallel };

int max_threads() noexcept;

}  // namespace golazo
