#include <benchmark/benchmark.h>

// The distro's benchmark_main archive ships LTO bytecode only, so the entry
// point lives here.
BENCHMARK_MAIN();
