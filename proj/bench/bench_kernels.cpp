#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "sfwm/array.hpp"
#include "sfwm/coupler.hpp"
#include "sfwm/design.hpp"
#include "sfwm/jsa.hpp"
#include "sfwm/materials.hpp"
#include "sfwm/parallel.hpp"

using namespace sfwm;

namespace {

ExecPolicy policy_for(Backend backend) {
    ExecPolicy p;
    p.backend = backend;
    return p;
}

ArraySpec wide_array() {
    const int n = 61;
    Eigen::VectorXcd excitation = Eigen::VectorXcd::Zero(n);
    excitation[n / 2] = 1.0;
    return make_uniform_array(n, 0.0125, 400.0, excitation);
}

void bm_propagate(benchmark::State& state, Backend backend) {
    const ArraySpec spec = wide_array();
    const std::vector<double> z = make_z_grid(spec.length, 4097);
    const ExecPolicy policy = policy_for(backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate(spec, z, policy));
    }
}

void bm_jsa(benchmark::State& state, Backend backend) {
    const ReferenceDesign d = reference_design();
    const PhasematchEnvelope envelope =
        guide_envelope(reference_array(d), d.heralded_guide, 257);
    JsaGridSpec grid;
    grid.n_signal = grid.n_idler = 256;
    const ExecPolicy policy = policy_for(backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_jsa(d.pump, d.channels, envelope, grid,
                      PhiMethod::analytic, policy));
    }
}

void bm_sweep(benchmark::State& state, Backend backend) {
    CouplerSpec base;
    base.width_main = 0.30;
    base.width_aux = 0.65;
    base.gap = 0.50;
    base.height = 0.22;
    base.core = make_sellmeier_material(
        "silicon",
        {{10.6684293, 0.301516485 * 0.301516485},
         {0.0030434748, 1.13475 * 1.13475},
         {1.54133408, 1104.0 * 1104.0}},
        1.25, 8.0);
    base.clad = make_sellmeier_material(
        "silica",
        {{0.6961663, 0.0684043 * 0.0684043},
         {0.4079426, 0.1162414 * 0.1162414},
         {0.8974794, 9.896161 * 9.896161}},
        0.21, 3.71);
    base.top = base.clad;
    base.wavelength = 1.37;
    const ExecPolicy policy = policy_for(backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            anti_crossing_sweep(base, 0.55, 0.80, 26, policy));
    }
}

}  // namespace

BENCHMARK_CAPTURE(bm_propagate, serial, Backend::serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_propagate, openmp, Backend::openmp)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_jsa, serial, Backend::serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_jsa, openmp, Backend::openmp)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_sweep, serial, Backend::serial)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_sweep, openmp, Backend::openmp)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
