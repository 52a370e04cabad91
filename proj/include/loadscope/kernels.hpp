#pragma once

#include <span>
#include <string_view>

namespace loadscope::kernels {

/// Instruction set backing the dispatched kernels.
enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
/// Best ISA supported by this CPU and build, unless overridden by
/// LOADSCOPE_SIMD=scalar in the environment.
Isa detected_isa();
Isa active_isa();
/// Test hook: switch dispatch target. Falls back to Scalar if unsupported.
void set_active_isa(Isa isa);
bool isa_available(Isa isa);

// Dispatched entry points. Lengths of paired spans must match.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum(std::span<const double> a);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
}  // namespace neon

}  // namespace loadscope::kernels
