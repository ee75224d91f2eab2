// Serial reference vs OpenMP kernels: wall time and agreement.
//
//   bench_kernels [--quick] [--max-len L] [--budget B] [--reps R]

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "kolmolab/complexity.hpp"
#include "kolmolab/kernels.hpp"

using namespace kolmolab;

namespace {

double best_seconds(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    best = std::min(best, dt.count());
  }
  return best;
}

void row(const std::string& name, double serial, double parallel, bool agree) {
  std::printf("%-40s %10.4f %10.4f %8.2fx  %s\n", name.c_str(), serial, parallel,
              parallel > 0 ? serial / parallel : 0.0, agree ? "agree" : "DISAGREE");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel program-space kernels"};
  bool quick = false;
  std::size_t max_len = 16;
  std::uint64_t budget = 64;
  int reps = 3;
  app.add_flag("--quick", quick, "Small sizes, one repetition (smoke test)");
  app.add_option("--max-len", max_len, "Program length bound");
  app.add_option("--budget", budget, "Step budget");
  app.add_option("--reps", reps, "Repetitions; the best time is reported");
  CLI11_PARSE(app, argc, argv);
  if (quick) {
    max_len = 10;
    reps = 1;
  }

  std::printf("threads: %d  max_len: %zu  budget: %llu\n", omp_get_max_threads(), max_len,
              static_cast<unsigned long long>(budget));
  std::printf("%-40s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");
  bool ok = true;

  for (const char* z : {"", "0110"}) {
    const BitString input = BitString::from_bits(z);
    std::vector<Outcome> a, b;
    const double ts = best_seconds(reps, [&] { a = kernels::tabulate_serial(max_len, input, budget); });
    const double tp = best_seconds(reps, [&] { b = kernels::tabulate_parallel(max_len, input, budget); });
    const bool agree = a == b;
    ok = ok && agree;
    row(std::string("tabulate z=") + (*z ? z : "λ"), ts, tp, agree);
  }

  // A target that no short program prints forces a full scan.
  for (const char* x : {"11", "0101101", "1111111111111111111111"}) {
    const BitString target = BitString::from_bits(x);
    ComplexityValue a, b;
    const double ts = best_seconds(
        reps, [&] { a = c_approx(target, budget, max_len, {Parallelism::kSerial, nullptr}); });
    const double tp = best_seconds(
        reps, [&] { b = c_approx(target, budget, max_len, {Parallelism::kParallel, nullptr}); });
    const bool agree = a.value == b.value && a.witness == b.witness;
    ok = ok && agree;
    row(std::string("c_approx x=") + x + " -> " + format_value(a.value), ts, tp, agree);
  }
  return ok ? 0 : 1;
}
