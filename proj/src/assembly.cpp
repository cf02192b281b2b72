#include "xfer/ulam/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "xfer/error.hpp"

namespace xfer {

namespace {

std::uint32_t narrow32(std::size_t v) {
    if (v > 0xffffffffu) throw CapacityError("index exceeds 32 bits");
    return static_cast<std::uint32_t>(v);
}

void check_layout(const BoxGrid& grid, const BoxPoints& points, const BoxPoints& images) {
    if (points.dim != grid.dim() || images.dim != grid.dim())
        throw DimensionError("point dimension does not match grid");
    if (points.boxes != grid.shape().total() || images.boxes != points.boxes || images.per_box != points.per_box)
        throw DimensionError("point set layout does not match grid");
    if (points.per_box == 0) throw RangeError("points per box must be at least 1");
}

[[noreturn]] void throw_empty(const BoxGrid& grid, std::size_t box0) {
    const MultiIndex i = linear_to_multiindex(box0 + 1, grid.shape());
    std::string s;
    for (std::size_t mu = 0; mu < i.size(); ++mu) s += (mu ? "," : "") + std::to_string(i[mu]);
    throw EmptyRowError("no test point of box (" + s + ") was mapped into the domain", box0 + 1);
}

// Orders (i, j) pairs by (î, ĵ): the row box is the major key and each multi-index is compared from its last
// mode, which is ascending linear-index order.
struct PairLess {
    std::size_t d;
    bool operator()(const std::vector<std::uint32_t>& x, const std::vector<std::uint32_t>& y) const {
        for (std::size_t k = d; k-- > 0;)
            if (x[k] != y[k]) return x[k] < y[k];
        for (std::size_t k = 2 * d; k-- > d;)
            if (x[k] != y[k]) return x[k] < y[k];
        return false;
    }
};

}  // namespace

PointMap sde_point_map(const SdeSystem& sys) {
    return [sys](std::span<const double> x, RandomStream& rng) { return flow_map(sys, x, rng); };
}

BoxPoints sample_test_points(const BoxGrid& grid, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw RangeError("points per box must be at least 1");
    const ModeShape& shape = grid.shape();
    const std::size_t d = grid.dim();
    BoxPoints out{d, shape.total(), n, std::vector<double>(shape.total() * n * d)};
    std::vector<std::size_t> idx(d, 0);
    for (std::size_t b = 0; b < out.boxes; ++b) {
        unravel0(b, shape, idx.data());
        for (std::size_t l = 0; l < n; ++l) {
            RandomStream rng(seed, StreamPurpose::TestPoints, narrow32(b), narrow32(l));
            auto x = out.point(b, l);
            for (std::size_t mu = 0; mu < d; ++mu) {
                const double lo = grid.lower(mu) + static_cast<double>(idx[mu]) * grid.width(mu);
                const double mid = lo + 0.5 * grid.width(mu);
                double v = lo + rng.uniform() * grid.width(mu);
                while (grid.subinterval(mu, v) != idx[mu] + 1) v = std::nextafter(v, mid);
                x[mu] = v;
            }
        }
    }
    return out;
}

BoxPoints map_points(const BoxPoints& points, const PointMap& map, std::uint64_t seed) {
    BoxPoints out = points;
    const std::ptrdiff_t boxes = static_cast<std::ptrdiff_t>(points.boxes);
    std::vector<std::exception_ptr> failures(points.boxes);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t b = 0; b < boxes; ++b) {
        try {
            for (std::size_t l = 0; l < points.per_box; ++l) {
                RandomStream rng(seed, StreamPurpose::Noise, narrow32(static_cast<std::size_t>(b)), narrow32(l));
                const Point y = map(points.point(static_cast<std::size_t>(b), l), rng);
                if (y.size() != points.dim) throw DimensionError("map returned a point of wrong dimension");
                std::copy(y.begin(), y.end(), out.point(static_cast<std::size_t>(b), l).begin());
            }
        } catch (...) {
            failures[static_cast<std::size_t>(b)] = std::current_exception();
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    return out;
}

double RetainedMass::total_fraction() const {
    if (kept.empty() || per_box == 0) return 0.0;
    std::size_t s = 0;
    for (auto k : kept) s += k;
    return static_cast<double>(s) / static_cast<double>(kept.size() * per_box);
}

double RetainedMass::min_fraction() const {
    if (kept.empty() || per_box == 0) return 0.0;
    return static_cast<double>(*std::min_element(kept.begin(), kept.end())) / static_cast<double>(per_box);
}

TransitionDense assemble_dense(const BoxGrid& grid, const BoxPoints& points, const BoxPoints& images,
                               const AssemblyOptions& opts) {
    check_layout(grid, points, images);
    const std::size_t K = grid.shape().total();
    TransitionDense out;
    out.P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    out.mass.per_box = points.per_box;
    out.mass.kept.assign(K, 0);
    std::vector<std::size_t> counts(K);
    for (std::size_t row = 0; row < K; ++row) {
        std::fill(counts.begin(), counts.end(), 0);
        std::size_t kept = 0;
        for (std::size_t l = 0; l < points.per_box; ++l) {
            const auto j = ind(grid, images.point(row, l));
            if (!j) continue;
            ++counts[multiindex_to_linear(*j, grid.shape()) - 1];
            ++kept;
        }
        out.mass.kept[row] = kept;
        if (kept == 0) {
            if (!opts.allow_empty_rows) throw_empty(grid, row);
            out.mass.empty_rows.push_back(row);
            continue;
        }
        for (std::size_t col = 0; col < K; ++col)
            if (counts[col])
                out.P(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                    static_cast<double>(counts[col]) / static_cast<double>(kept);
    }
    return out;
}

TransitionDense assemble_dense(const BoxGrid& grid, const SdeSystem& sys, std::size_t n, std::uint64_t seed,
                               const AssemblyOptions& opts) {
    const BoxPoints x = sample_test_points(grid, n, seed);
    return assemble_dense(grid, x, map_points(x, sde_point_map(sys), seed), opts);
}

TransitionCP assemble_tensor(const BoxGrid& grid, const BoxPoints& points, const BoxPoints& images,
                             const AssemblyOptions& opts) {
    check_layout(grid, points, images);
    const std::size_t d = grid.dim();
    const ModeShape& shape = grid.shape();
    TransitionCP out;
    out.shape = shape;
    out.per_box = points.per_box;
    out.mass.per_box = points.per_box;

    std::map<std::vector<std::uint32_t>, std::uint32_t, PairLess> counts(PairLess{d});
    std::vector<std::size_t> box_kept;
    std::vector<std::uint32_t> key(2 * d);
    // Walk boxes by multi-index (first mode fastest); `slot` tracks the storage position of the point batch.
    MultiIndex i(d, 1);
    for (std::size_t slot = 0; slot < points.boxes; ++slot) {
        std::size_t kept = 0;
        for (std::size_t l = 0; l < points.per_box; ++l) {
            const auto j = ind(grid, images.point(slot, l));
            if (!j) continue;
            for (std::size_t mu = 0; mu < d; ++mu) {
                key[mu] = narrow32(i[mu] - 1);
                key[d + mu] = narrow32((*j)[mu] - 1);
            }
            ++counts[key];
            ++kept;
        }
        box_kept.push_back(kept);
        if (kept == 0) {
            if (!opts.allow_empty_rows) throw_empty(grid, slot);
            out.mass.empty_rows.push_back(slot);
        }
        for (std::size_t mu = 0; mu < d; ++mu) {
            if (++i[mu] <= shape[mu]) break;
            i[mu] = 1;
        }
    }
    out.mass.kept = box_kept;
    out.entries.reserve(counts.size());
    for (const auto& [k, c] : counts) {
        TransitionEntry e;
        e.from.assign(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(d));
        e.to.assign(k.begin() + static_cast<std::ptrdiff_t>(d), k.end());
        e.count = c;
        e.weight = static_cast<double>(c) / static_cast<double>(box_kept[linear0(
            std::vector<std::size_t>(e.from.begin(), e.from.end()).data(), shape)]);
        out.entries.push_back(std::move(e));
    }
    return out;
}

TransitionCP assemble_tensor(const BoxGrid& grid, const SdeSystem& sys, std::size_t n, std::uint64_t seed,
                             const AssemblyOptions& opts) {
    const BoxPoints x = sample_test_points(grid, n, seed);
    return assemble_tensor(grid, x, map_points(x, sde_point_map(sys), seed), opts);
}

CPOperator TransitionCP::to_cp() const {
    CPOperator A(shape, shape);
    for (const auto& e : entries) {
        std::vector<Eigen::MatrixXd> f;
        for (std::size_t mu = 0; mu < shape.order(); ++mu) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(shape[mu]),
                                                      static_cast<Eigen::Index>(shape[mu]));
            m(e.from[mu], e.to[mu]) = mu == 0 ? e.weight : 1.0;
            f.push_back(std::move(m));
        }
        A.terms.push_back(std::move(f));
    }
    return A;
}

FullOperator densify(const TransitionCP& P, std::size_t guard) {
    const std::size_t K = P.shape.total();
    check_guard(K * K, guard, "Ulam tensor");
    FullOperator out(P.shape, P.shape);
    std::vector<std::size_t> a(P.shape.order()), b(P.shape.order());
    for (const auto& e : P.entries) {
        std::copy(e.from.begin(), e.from.end(), a.begin());
        std::copy(e.to.begin(), e.to.end(), b.begin());
        out.at0(linear0(a.data(), P.shape), linear0(b.data(), P.shape)) += e.weight;
    }
    return out;
}

FullTensor subtensor_row_sums(const TransitionCP& P) {
    FullTensor out(P.shape);
    std::vector<std::size_t> a(P.shape.order());
    for (const auto& e : P.entries) {
        std::copy(e.from.begin(), e.from.end(), a.begin());
        out[linear0(a.data(), P.shape)] += e.weight;
    }
    return out;
}

FullTensor subtensor_row_sums(const FullOperator& P) {
    FullTensor out(P.row_shape());
    const std::size_t R = P.row_shape().total(), C = P.col_shape().total();
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t r = 0; r < R; ++r) out[r] += P.at0(r, c);
    return out;
}

TTOperator transition_to_tt(const TransitionCP& P, double eps, std::optional<std::size_t> r_max, std::size_t guard,
                            RoundReport* report) {
    const std::size_t K = P.shape.total();
    if (K <= guard / std::max<std::size_t>(K, 1)) return full_to_tt(densify(P, guard), eps, r_max, report);

    constexpr std::size_t kChunk = 256;
    double norm2 = 0.0;
    for (const auto& e : P.entries) norm2 += e.weight * e.weight;
    const std::size_t chunks = std::max<std::size_t>(1, (P.entries.size() + kChunk - 1) / kChunk);
    const double eps_mid = 0.5 * eps / static_cast<double>(chunks);

    std::optional<TTOperator> acc;
    double abs_err = 0.0;
    RoundReport rep;
    for (std::size_t start = 0; start < P.entries.size(); start += kChunk) {
        TransitionCP part;
        part.shape = P.shape;
        part.entries.assign(P.entries.begin() + static_cast<std::ptrdiff_t>(start),
                            P.entries.begin() + static_cast<std::ptrdiff_t>(std::min(start + kChunk, P.entries.size())));
        TTOperator t = cp_to_tt(part.to_cp());
        t = acc ? tt_add(*acc, t) : t;
        acc = tt_round(t, eps_mid, std::nullopt, &rep);
        abs_err += rep.abs_error;
    }
    if (!acc) acc = cp_to_tt(P.to_cp());
    TTOperator result = tt_round(*acc, 0.5 * eps, r_max, &rep);
    if (report) {
        *report = rep;
        report->abs_error = abs_err + rep.abs_error;
        report->input_norm = std::sqrt(norm2);
        report->rel_error = norm2 > 0 ? report->abs_error / report->input_norm : 0.0;
    }
    return result;
}

}  // namespace xfer
