#include "golazo/parallel.hpp"

#include <omp.h>

namespace golazo {

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace golazo
