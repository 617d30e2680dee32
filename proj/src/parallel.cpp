#include "ssvep/parallel.hpp"

#include <thread>

namespace ssvep {

namespace {

int default_workers() noexcept
{
#ifdef _OPENMP
    return omp_get_num_procs();
#else
    const auto n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
#endif
}

} // namespace

int worker_count() noexcept
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_worker_count(int n) noexcept
{
#ifdef _OPENMP
    omp_set_num_threads(n > 0 ? n : default_workers());
#else
    (void)n;
    (void)default_workers;
#endif
}

} // namespace ssvep
