#include <benchmark/benchmark.h>

#include <string>

#include "sct/typecheck.hpp"

namespace {

/// `n` independent sessions new(aI,bI:?int) (aI?(y:int).0 | bI!(v).0) in parallel.
std::string sessions(std::size_t n) {
    std::string p;
    for (std::size_t i = 0; i < n; ++i) {
        auto k = std::to_string(i);
        p += (i ? " | " : "") + std::string("new(a") + k + ",b" + k + ":?int) (a" + k + "?(y:int).0 | b" + k +
             "!(v).0)";
    }
    return p;
}

/// One channel used `n` times in sequence.
std::pair<std::string, std::string> sequence(std::size_t n) {
    std::string t, p;
    for (std::size_t i = 0; i < n; ++i) {
        t += "?int.";
        p += "x?(y" + std::to_string(i) + ":int).";
    }
    return {t + "end", p + "0"};
}

void BM_AlgoSequence(benchmark::State& state) {
    auto [t, text] = sequence(static_cast<std::size_t>(state.range(0)));
    sct::TypeStore s;
    sct::TypingContext g{{"x", s.add(std::string_view(t))}};
    auto p = sct::parse_process(text);
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::algo_check(s, g, p).verdict);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AlgoSequence)->RangeMultiplier(4)->Range(4, 256)->Complexity();

void BM_AlgoSessions(benchmark::State& state) {
    sct::TypeStore s;
    sct::TypingContext g{{"v", s.add(std::string_view("int"))}};
    auto p = sct::parse_process(sessions(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::algo_check(s, g, p).verdict);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AlgoSessions)->RangeMultiplier(2)->Range(1, 64)->Complexity();

void BM_OracleSessions(benchmark::State& state) {
    sct::TypeStore s;
    sct::TypingContext g{{"v", s.add(std::string_view("int"))}};
    auto p = sct::parse_process(sessions(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::declarative_check(s, g, p));
}
BENCHMARK(BM_OracleSessions)->DenseRange(1, 6);

void BM_Run(benchmark::State& state) {
    auto p = sct::parse_process(sessions(static_cast<std::size_t>(state.range(0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(sct::run(p, 1000, 0).steps.size());
}
BENCHMARK(BM_Run)->RangeMultiplier(2)->Range(1, 32);

} // namespace
