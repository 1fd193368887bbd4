#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sollab/grid.hpp"

// Method-of-lines kernels for u_tt = Laplacian u + N(u) - V u on a RadialGrid.
//
// Each kernel has a serial reference and an OpenMP version; they perform the
// same arithmetic in the same order per node, so results agree bitwise.
namespace sollab::kernels {

enum class Source { none, quadratic, signed_quadratic };

// Conservative radial Laplacian r^-5 (r^5 u_r)_r in xi: L = -W^-1 D^T A D / dxi^2
// with D the 4th-order staggered difference (2-point on the two faces nearest
// the origin), A = r^5/r' at faces and W node volumes: inside the uniform core
// those for which L r^2 = 12 exactly, W = r^5 r' outside. L is self-adjoint in
// the W inner product, so its spectrum is real and nonpositive and RK4 is
// stable under the CFL limit.
inline constexpr int kStencilWidth = 7;

struct LaplacianStencil {
    std::vector<std::array<std::size_t, kStencilWidth>> index;
    std::vector<std::array<double, kStencilWidth>> weight;
    std::size_t active = 0; // nodes [0, active) are evolved; the rest are frozen

    explicit LaplacianStencil(const RadialGrid& grid, std::size_t frozen = 2);
    std::size_t size() const { return index.size(); }
};

struct WaveRhs {
    const LaplacianStencil* stencil = nullptr;
    Source source = Source::quadratic;
    std::span<const double> potential; // V per node; empty for none
};

// (du, dv) = (v, Laplacian u + N(u) - V u); frozen nodes get zero.
void rhs_serial(const WaveRhs& op, std::span<const double> u, std::span<const double> v, std::span<double> du,
                std::span<double> dv);
void rhs_parallel(const WaveRhs& op, std::span<const double> u, std::span<const double> v, std::span<double> du,
                  std::span<double> dv);

// y = x + a * k
void axpy_serial(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);
void axpy_parallel(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);

// x += h/6 (k1 + 2 k2 + 2 k3 + k4)
void rk4_combine_serial(std::span<double> x, double h, std::span<const double> k1, std::span<const double> k2,
                        std::span<const double> k3, std::span<const double> k4);
void rk4_combine_parallel(std::span<double> x, double h, std::span<const double> k1, std::span<const double> k2,
                          std::span<const double> k3, std::span<const double> k4);

// One classical RK4 step of the wave system in place, using scratch buffers.
class Rk4Stepper {
public:
    Rk4Stepper(WaveRhs op, std::size_t n, bool parallel);
    void step(std::vector<double>& u, std::vector<double>& v, double dt);

private:
    void rhs(std::span<const double> u, std::span<const double> v, std::span<double> du, std::span<double> dv);
    void axpy(std::span<const double> x, double a, std::span<const double> k, std::span<double> y);

    WaveRhs op_;
    bool parallel_;
    std::array<std::vector<double>, 4> ku_, kv_;
    std::vector<double> us_, vs_;
};

} // namespace sollab::kernels
