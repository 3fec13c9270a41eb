#include <benchmark/benchmark.h>

#include <string>

#include "sct/relations.hpp"
#include "sct/typecheck.hpp"

namespace {

/// rec X.?int.!bool. ... .X with `n` actions per period.
std::string periodic(std::size_t n, const char* a, const char* b) {
    std::string t = "rec X.";
    for (std::size_t i = 0; i < n; ++i)
        t += i % 2 ? b : a;
    return t + "X";
}

void BM_Bisim(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    sct::TypeStore s;
    auto x = s.add(std::string_view(periodic(n, "?int.", "!bool.")));
    auto y = s.add(std::string_view(periodic(2 * n, "?int.", "!bool.")));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::decide_bisimilar(s.coalgebra(), x, y).verdict);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bisim)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_Sim(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    sct::TypeStore s;
    auto x = s.add(std::string_view(periodic(n, "?int.", "!real.")));
    auto y = s.add(std::string_view(periodic(n, "?real.", "!int.")));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::decide_similar(s.coalgebra(), x, y).verdict);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sim)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_DualClosure(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto tc = sct::type_to_coalgebra(sct::parse_type(periodic(n, "&{a: ?int.", "+{b: !int.")
                                                      .append(std::string(n / 2, '}'))
                                                      .append(std::string(n - n / 2, '}'))));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::dual_closure(tc.coalgebra, tc.root).dual);
}
BENCHMARK(BM_DualClosure)->RangeMultiplier(4)->Range(4, 64);

void BM_Parallelizable(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    sct::TypeStore s;
    auto x = s.add(std::string_view(periodic(n, "un ?int.", "un ?int.")));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::decide_parallelizable(s.coalgebra(), x).verdict);
}
BENCHMARK(BM_Parallelizable)->RangeMultiplier(4)->Range(4, 256);

} // namespace
