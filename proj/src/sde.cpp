#include "xfer/dynamics/sde.hpp"

#include <cmath>
#include <sstream>

#include "xfer/error.hpp"

namespace xfer {

namespace {

template <class Model>
void rotate_noise(const Model&, double*) {}

void rotate_noise(const RotatedDoubleWell& m, double* xi) {
    if (m.alpha != 0.0) m.rotate(xi);
}

[[noreturn]] void diverged(const double* x, std::size_t d, std::size_t step) {
    std::ostringstream os;
    os.precision(17);
    os << "Euler-Maruyama state became non-finite at step " << step << ": (";
    for (std::size_t mu = 0; mu < d; ++mu) os << (mu ? ", " : "") << x[mu];
    os << ')';
    throw DivergenceError(os.str());
}

template <class Model>
void integrate(const Model& m, const SdeSystem& sys, double* x, std::size_t d, std::size_t steps, RandomStream& rng,
               const std::function<void(std::size_t, const double*)>* sink = nullptr, std::size_t stride = 1) {
    double g[8], xi[8];
    const double noise = sys.sigma * std::sqrt(sys.h);
    for (std::size_t n = 0; n < steps; ++n) {
        m.gradient(x, g);
        for (std::size_t mu = 0; mu < d; ++mu) xi[mu] = rng.normal();
        rotate_noise(m, xi);
        bool finite = true;
        for (std::size_t mu = 0; mu < d; ++mu) {
            x[mu] = x[mu] - g[mu] * sys.h + noise * xi[mu];
            finite = finite && std::isfinite(x[mu]);
        }
        if (!finite) diverged(x, d, n + 1);
        if (sink && (n + 1) % stride == 0) (*sink)(n + 1, x);
    }
}

Point run(const SdeSystem& sys, std::span<const double> x, RandomStream& rng, std::size_t steps) {
    const std::size_t d = sys.dim();
    if (x.size() != d) throw DimensionError("state has dimension " + std::to_string(x.size()) + ", system has " +
                                            std::to_string(d));
    if (d > 8) throw DimensionError("SDE integrator supports at most 8 dimensions");
    for (double v : x)
        if (!std::isfinite(v)) throw DivergenceError("initial state is not finite");
    Point y(x.begin(), x.end());
    std::visit([&](const auto& m) { integrate(m, sys, y.data(), d, steps, rng); }, sys.potential.model());
    return y;
}

}  // namespace

Point em_step(const SdeSystem& sys, std::span<const double> x, RandomStream& rng) { return run(sys, x, rng, 1); }

Point flow_map(const SdeSystem& sys, std::span<const double> x, RandomStream& rng) {
    return run(sys, x, rng, sys.steps);
}

void simulate_trajectory(const SdeSystem& sys, std::span<const double> x0, RandomStream& rng, std::size_t steps,
                         std::size_t stride, const std::function<void(double, std::span<const double>)>& sink) {
    const std::size_t d = sys.dim();
    if (x0.size() != d) throw DimensionError("initial state has wrong dimension");
    if (stride == 0) stride = 1;
    Point y(x0.begin(), x0.end());
    sink(0.0, y);
    const std::function<void(std::size_t, const double*)> cb = [&](std::size_t n, const double* x) {
        sink(static_cast<double>(n) * sys.h, std::span<const double>(x, d));
    };
    std::visit([&](const auto& m) { integrate(m, sys, y.data(), d, steps, rng, &cb, stride); },
               sys.potential.model());
}

}  // namespace xfer
