#include "sarms/parallel.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace sarms {

int configure_threads_from_env()
{
    const char* v = std::getenv("SARMS3D_THREADS");
    if (v && *v) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (*end != '\0' || n < 1) throw std::invalid_argument(std::string("SARMS3D_THREADS must be a positive integer, got '") + v + "'");
        if (n < omp_get_max_threads()) omp_set_num_threads(static_cast<int>(n));
    }
    return omp_get_max_threads();
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n)
{
    if (n < 1) throw std::invalid_argument("thread count must be positive");
    omp_set_num_threads(n);
}

}  // namespace sarms
