#pragma once

#include <cstddef>

namespace anisodiff {

/// Anisotropy exponents and the Hölder regularity tags of the two velocity
/// components. The tags are carried for reporting only.
struct AnisotropyParams {
    double p = 2.0;
    double q = 3.0;
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
};

enum class Boundary { Periodic };

/// Periodic box [-half_width_x, half_width_x) x [-half_width_y, half_width_y)
/// sampled at nx * ny cell centers.
class DomainBox {
public:
    DomainBox(double half_width_x, double half_width_y, std::size_t nx, std::size_t ny);

    double half_width_x() const noexcept { return lx_; }
    double half_width_y() const noexcept { return ly_; }
    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return nx_ * ny_; }
    Boundary boundary() const noexcept { return Boundary::Periodic; }

    double hx() const noexcept { return 2.0 * lx_ / static_cast<double>(nx_); }
    double hy() const noexcept { return 2.0 * ly_ / static_cast<double>(ny_); }
    double cell_area() const noexcept { return hx() * hy(); }
    double area() const noexcept { return 4.0 * lx_ * ly_; }

    double x_center(std::size_t i) const noexcept { return -lx_ + (static_cast<double>(i) + 0.5) * hx(); }
    double y_center(std::size_t j) const noexcept { return -ly_ + (static_cast<double>(j) + 0.5) * hy(); }

    /// Maps any real coordinate into [-L, L).
    double wrap_x(double x) const noexcept { return wrap(x, lx_); }
    double wrap_y(double y) const noexcept { return wrap(y, ly_); }

    bool operator==(const DomainBox&) const = default;

private:
    static double wrap(double v, double half) noexcept;

    double lx_;
    double ly_;
    std::size_t nx_;
    std::size_t ny_;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// (x^2 + eps^2)^(p/2); equals |x|^p when eps == 0.
double scaling_f(double x, const AnisotropyParams& params, double eps);
/// (y^2 + eps^2)^(q/2); equals |y|^q when eps == 0.
double scaling_g(double y, const AnisotropyParams& params, double eps);

enum class FlowKind {
    StreamFunction,  // psi = A f(x) g(y)
    Shear,           // u = (A g(y), 0)
    Constant,        // rigid translation, used by tests of the advection step
    Zero             // explicitly flagged pure-diffusion run
};

enum class FlowIntent { Advective, PureDiffusion };

/// Autonomous, divergence-free velocity field. Evaluation is a pure function
/// of (x, y); the field is immutable once built.
class VelocityField {
public:
    VelocityField() = default;

    FlowKind kind() const noexcept { return kind_; }
    const AnisotropyParams& params() const noexcept { return params_; }
    double amplitude() const noexcept { return amplitude_; }
    double regularization() const noexcept { return eps_; }
    bool is_zero() const noexcept { return kind_ == FlowKind::Zero; }

    Vec2 operator()(double x, double y) const noexcept;

    /// Closed-form divergence (du_x/dx + du_y/dy). Identically zero up to
    /// rounding for every kind.
    double analytic_divergence(double x, double y) const noexcept;

    /// Maximum |u| over the cell centers of a box.
    double max_speed(const DomainBox& box) const noexcept;

private:
    friend VelocityField make_velocity(const AnisotropyParams&, double, double, FlowIntent);
    friend VelocityField make_shear_velocity(const AnisotropyParams&, double, double);
    friend VelocityField make_constant_velocity(double, double);
    friend VelocityField make_zero_velocity();

    FlowKind kind_ = FlowKind::Zero;
    AnisotropyParams params_{};
    double amplitude_ = 0.0;
    double eps_ = 0.0;
    Vec2 constant_{};
};

/// Stream-function field u = (dpsi/dy, -dpsi/dx) with psi = A f(x) g(y).
/// A == 0 is only accepted together with FlowIntent::PureDiffusion.
VelocityField make_velocity(const AnisotropyParams& params, double amplitude, double eps,
                            FlowIntent intent = FlowIntent::Advective);
/// Pure shear u = (A g(y), 0), the classical comparison flow.
VelocityField make_shear_velocity(const AnisotropyParams& params, double amplitude, double eps);
VelocityField make_constant_velocity(double ux, double uy);
VelocityField make_zero_velocity();

/// Max over cell centers of the centered-difference divergence. Neighbours are
/// evaluated from the closed form at x +/- h without periodic wrapping.
double divergence_residual(const VelocityField& field, const DomainBox& box);

}  // namespace anisodiff
