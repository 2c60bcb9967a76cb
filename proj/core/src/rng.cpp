#include "lsyk/rng.hpp"

#include <cmath>

namespace lsyk {

double CounterRng::exponential() noexcept { return -std::log(uniform_open()); }

}  // namespace lsyk
