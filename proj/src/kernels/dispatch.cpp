#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "loadscope/kernels.hpp"

namespace loadscope::kernels {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
};

constexpr Table kScalar{scalar::dot, scalar::squared_distance, scalar::axpy, scalar::sum};
#if defined(LOADSCOPE_HAVE_AVX2_TU)
constexpr Table kAvx2{avx2::dot, avx2::squared_distance, avx2::axpy, avx2::sum};
#endif
#if defined(LOADSCOPE_HAVE_NEON_TU)
constexpr Table kNeon{neon::dot, neon::squared_distance, neon::axpy, neon::sum};
#endif

const Table* table_for(Isa isa) {
  switch (isa) {
#if defined(LOADSCOPE_HAVE_AVX2_TU)
    case Isa::Avx2: return &kAvx2;
#endif
#if defined(LOADSCOPE_HAVE_NEON_TU)
    case Isa::Neon: return &kNeon;
#endif
    default: return &kScalar;
  }
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

const Table& current() { return *table_for(active().load(std::memory_order_relaxed)); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(LOADSCOPE_HAVE_AVX2_TU)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(LOADSCOPE_HAVE_NEON_TU)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (const char* env = std::getenv("LOADSCOPE_SIMD"); env && std::string(env) == "scalar") return Isa::Scalar;
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() { return active().load(); }

void set_active_isa(Isa isa) { active().store(isa_available(isa) ? isa : Isa::Scalar); }

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return current().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return current().squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  current().axpy(alpha, x.data(), y.data(), x.size());
}

double sum(std::span<const double> a) { return current().sum(a.data(), a.size()); }

}  // namespace loadscope::kernels
