#include "xfer/dynamics/potential.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "xfer/error.hpp"

namespace xfer {

double RotatedDoubleWell::value(const double* x) const {
    const double c = std::cos(alpha), s = std::sin(alpha);
    const double y1 = c * x[0] - s * x[1];
    const double y2 = s * x[0] + c * x[1];
    const double t = y1 * y1 - 1.0;
    return t * t + y2 * y2;
}

void RotatedDoubleWell::gradient(const double* x, double* g) const {
    const double c = std::cos(alpha), s = std::sin(alpha);
    const double y1 = c * x[0] - s * x[1];
    const double y2 = s * x[0] + c * x[1];
    const double g1 = 4.0 * y1 * (y1 * y1 - 1.0);
    const double g2 = 2.0 * y2;
    g[0] = c * g1 + s * g2;
    g[1] = -s * g1 + c * g2;
}

void RotatedDoubleWell::rotate(double* v) const {
    const double c = std::cos(alpha), s = std::sin(alpha);
    const double a = c * v[0] + s * v[1];
    const double b = -s * v[0] + c * v[1];
    v[0] = a;
    v[1] = b;
}

double TripleWell3D::value(const double* x) const {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    const double e1 = std::exp(-x1 * x1 - (x2 - 1.0 / 3.0) * (x2 - 1.0 / 3.0));
    const double e2 = std::exp(-x1 * x1 - (x2 - 5.0 / 3.0) * (x2 - 5.0 / 3.0));
    const double e3 = std::exp(-(x1 - 1.0) * (x1 - 1.0) - x2 * x2);
    const double e4 = std::exp(-(x1 + 1.0) * (x1 + 1.0) - x2 * x2);
    const double q = x2 - 1.0 / 3.0;
    return 3.0 * e1 - 3.0 * e2 - 5.0 * e3 - 5.0 * e4 + 0.2 * x1 * x1 * x1 * x1 + 0.2 * q * q * q * q + x3 * x3;
}

void TripleWell3D::gradient(const double* x, double* g) const {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    const double a = x2 - 1.0 / 3.0, b = x2 - 5.0 / 3.0;
    const double e1 = std::exp(-x1 * x1 - a * a);
    const double e2 = std::exp(-x1 * x1 - b * b);
    const double e3 = std::exp(-(x1 - 1.0) * (x1 - 1.0) - x2 * x2);
    const double e4 = std::exp(-(x1 + 1.0) * (x1 + 1.0) - x2 * x2);
    g[0] = 3.0 * e1 * (-2.0 * x1) - 3.0 * e2 * (-2.0 * x1) - 5.0 * e3 * (-2.0 * (x1 - 1.0)) -
           5.0 * e4 * (-2.0 * (x1 + 1.0)) + 0.8 * x1 * x1 * x1;
    g[1] = 3.0 * e1 * (-2.0 * a) - 3.0 * e2 * (-2.0 * b) - 5.0 * e3 * (-2.0 * x2) - 5.0 * e4 * (-2.0 * x2) +
           0.8 * a * a * a;
    g[2] = 2.0 * x3;
}

double Quadratic::value(const double* x) const {
    double v = 0.0;
    for (std::size_t mu = 0; mu < stiffness.size(); ++mu) v += 0.5 * stiffness[mu] * x[mu] * x[mu];
    return v;
}

void Quadratic::gradient(const double* x, double* g) const {
    for (std::size_t mu = 0; mu < stiffness.size(); ++mu) g[mu] = stiffness[mu] * x[mu];
}

Potential::Potential(std::string name, Model model, std::map<std::string, double> params)
    : name_(std::move(name)), model_(std::move(model)), params_(std::move(params)) {}

std::size_t Potential::dim() const {
    return std::visit(
        [](const auto& m) -> std::size_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, Quadratic>)
                return m.stiffness.size();
            else
                return std::decay_t<decltype(m)>::dim;
        },
        model_);
}

double Potential::value(std::span<const double> x) const {
    if (x.size() != dim()) throw DimensionError("potential " + name_ + " expects dimension " + std::to_string(dim()));
    return std::visit([&](const auto& m) { return m.value(x.data()); }, model_);
}

void Potential::gradient(std::span<const double> x, std::span<double> g) const {
    if (x.size() != dim() || g.size() != dim())
        throw DimensionError("potential " + name_ + " expects dimension " + std::to_string(dim()));
    std::visit([&](const auto& m) { m.gradient(x.data(), g.data()); }, model_);
}

std::vector<double> Potential::gradient(std::span<const double> x) const {
    std::vector<double> g(dim());
    gradient(x, g);
    return g;
}

std::string Potential::describe() const {
    if (params_.empty()) return name_;
    std::ostringstream os;
    os.precision(17);
    os << name_ << '(';
    bool first = true;
    for (const auto& [k, v] : params_) {
        os << (first ? "" : ",") << k << '=' << v;
        first = false;
    }
    os << ')';
    return os.str();
}

Potential rotated_double_well(double alpha) {
    return Potential("double_well", RotatedDoubleWell{alpha}, {{"alpha", alpha}});
}

Potential triple_well_3d() { return Potential("triple_well3d", TripleWell3D{}); }

Potential quadratic_potential(std::vector<double> stiffness) {
    return Potential("quadratic", Quadratic{std::move(stiffness)});
}

Potential flat_potential(std::size_t dim) { return Potential("flat", Quadratic{std::vector<double>(dim, 0.0)}); }

Potential parse_potential(const std::string& text) {
    static const std::regex form(R"(\s*([a-z_0-9]+)\s*(?:\((.*)\))?\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, form)) throw ConfigError("cannot parse potential '" + text + "'");
    const std::string name = m[1];
    std::map<std::string, double> args;
    if (m[2].matched) {
        static const std::regex kv(R"(\s*([a-z_]+)\s*=\s*([^,\s]+)\s*)");
        std::stringstream ss(m[2].str());
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::smatch km;
            if (!std::regex_match(item, km, kv)) throw ConfigError("bad potential argument '" + item + "'");
            try {
                args[km[1]] = std::stod(km[2]);
            } catch (const std::exception&) {
                throw ConfigError("potential argument '" + km[1].str() + "' is not a number");
            }
        }
    }
    if (name == "double_well") {
        double alpha = 0.0;
        for (const auto& [k, v] : args) {
            if (k != "alpha") throw ConfigError("double_well has no parameter '" + k + "'");
            alpha = v;
        }
        return rotated_double_well(alpha);
    }
    if (name == "triple_well3d") {
        if (!args.empty()) throw ConfigError("triple_well3d takes no parameters");
        return triple_well_3d();
    }
    throw ConfigError("unknown potential '" + name + "'");
}

std::function<double(std::span<const double>)> analytic_invariant_density(const Potential& pot, double sigma) {
    if (!(sigma > 0.0)) throw RangeError("invariant density needs sigma > 0");
    const double beta = 2.0 / (sigma * sigma);
    return [pot, beta](std::span<const double> x) { return std::exp(-beta * pot.value(x)); };
}

}  // namespace xfer
