#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace xfer {

using Point = std::vector<double>;

/// V(x) = ((c x1 - s x2)^2 - 1)^2 + (s x1 + c x2)^2 with c = cos(alpha), s = sin(alpha).
struct RotatedDoubleWell {
    double alpha = 0.0;
    static constexpr std::size_t dim = 2;
    double value(const double* x) const;
    void gradient(const double* x, double* g) const;
    /// Rotation Q with V_alpha(Q y) = V_0(y); applied to the Brownian increments as well.
    void rotate(double* v) const;
};

/// Three-well potential in (x1, x2) plus a harmonic x3 direction.
struct TripleWell3D {
    static constexpr std::size_t dim = 3;
    double value(const double* x) const;
    void gradient(const double* x, double* g) const;
};

/// V(x) = 1/2 sum_mu c_mu x_mu^2; all c_mu = 0 gives a flat potential.
struct Quadratic {
    std::vector<double> stiffness;
    double value(const double* x) const;
    void gradient(const double* x, double* g) const;
};

class Potential {
public:
    using Model = std::variant<RotatedDoubleWell, TripleWell3D, Quadratic>;

    Potential(std::string name, Model model, std::map<std::string, double> params = {});

    const std::string& name() const { return name_; }
    const std::map<std::string, double>& params() const { return params_; }
    const Model& model() const { return model_; }
    std::size_t dim() const;

    double value(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> g) const;
    std::vector<double> gradient(std::span<const double> x) const;

    /// Canonical text form, e.g. "double_well(alpha=0.5)", accepted by parse_potential.
    std::string describe() const;

private:
    std::string name_;
    Model model_;
    std::map<std::string, double> params_;
};

Potential rotated_double_well(double alpha);
Potential triple_well_3d();
Potential quadratic_potential(std::vector<double> stiffness);
Potential flat_potential(std::size_t dim);

/// Parses "double_well(alpha=...)", "double_well", "triple_well3d". Throws ConfigError otherwise.
Potential parse_potential(const std::string& text);

/// Unnormalized stationary density exp(-beta V(x)) with beta = 2 / sigma^2.
std::function<double(std::span<const double>)> analytic_invariant_density(const Potential& pot, double sigma);

}  // namespace xfer
