// Benchmark of the data-parallel cores: serial reference vs OpenMP kernels.
// Prints one row per kernel with timings and the speedup, and checks that
// both paths produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "rwre/criteria.hpp"
#include "rwre/environment.hpp"
#include "rwre/geometry.hpp"
#include "rwre/parallel.hpp"
#include "rwre/quenched.hpp"
#include "rwre/walker.hpp"

using namespace rwre;

namespace {

double seconds(const std::chrono::steady_clock::time_point& a,
               const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

template <class Fn>
double timed(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return seconds(t0, t1);
}

void report(const char* name, double t_serial, double t_parallel, bool identical) {
    std::printf("%-28s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  identical=%s\n", name,
                t_serial, t_parallel, t_serial / t_parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
    const int workers = default_workers();
    std::printf("workers: %d\n", workers);

    {
        const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.01);
        const BoxSpec spec = BoxSpec::criterion(Rotation::identity(2), 10.0, 30.0);
        const LatticeBox box = build_box(spec, true);
        const Region region = as_region(box);
        const ExitSystem sys = ExitSystem::build(region);
        const std::int32_t start = region.interior_index.at(Site::origin());
        const SolverConfig cfg;
        const int n_env = 256;

        std::vector<double> a, b;
        const double ts = timed([&] { a = sample_p_plus_serial(law, region, sys, start, n_env, 7, cfg); });
        const double tp = timed(
            [&] { b = sample_p_plus_parallel(law, region, sys, start, n_env, 7, cfg, workers); });
        report("quenched p_plus solves", ts, tp, a == b);
    }

    {
        const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.01);
        const StopRule stop = StopRule::slab(Slab(Direction::axis(2, 0), 1.0, 12.0));
        const long n_walks = 40000;

        std::vector<std::uint8_t> a, b;
        const double ts = timed([&] { a = sample_outcomes_serial(law, stop, n_walks, 11); });
        const double tp =
            timed([&] { b = sample_outcomes_parallel(law, stop, n_walks, 11, workers); });
        report("annealed slab walks", ts, tp, a == b);
    }

    {
        const EnvironmentLaw law = EnvironmentLaw::dirichlet(2, {1, 1, 1, 1}, 0.01);
        const RenormBoxes rb = build_renorm_boxes(Direction::axis(2, 0), 0.6, 12.0, Site::origin());
        const SolverConfig cfg;
        const int n_env = 192;

        std::vector<double> a, b;
        const double ts = timed([&] { a = sample_x_stat_serial(law, rb, n_env, 13, cfg); });
        const double tp = timed([&] { b = sample_x_stat_parallel(law, rb, n_env, 13, cfg, workers); });
        report("renorm x-statistics", ts, tp, a == b);
    }

    return 0;
}
