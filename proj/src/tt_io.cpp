#include <cstdint>
#include <cstring>
#include <fstream>

#include "xfer/error.hpp"
#include "xfer/formats/tt.hpp"

namespace xfer {

namespace {

static_assert(sizeof(double) == 8, "float64 storage required");

void put_u64(std::ostream& os, std::uint64_t x) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(x >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated TT dump");
    std::uint64_t x = 0;
    for (int k = 7; k >= 0; --k) x = (x << 8) | b[k];
    return x;
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t x;
    std::memcpy(&x, &v, 8);
    put_u64(os, x);
}

double get_f64(std::istream& is) {
    const std::uint64_t x = get_u64(is);
    double v;
    std::memcpy(&v, &x, 8);
    return v;
}

void expect_magic(std::istream& is, const char* magic) {
    char m[4];
    if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw IoError(std::string("bad magic, expected ") + magic);
}

// On disk each core is row-major in (r0, modes..., r1): last index fastest.
void write_core(std::ostream& os, const TTCore& c, std::size_t n, std::size_t m) {
    for (std::size_t a = 0; a < c.r0; ++a)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t b = 0; b < c.r1; ++b) put_f64(os, c.data[a + c.r0 * (i + n * (j + m * b))]);
}

TTCore read_core(std::istream& is, std::size_t r0, std::size_t n, std::size_t m, std::size_t r1) {
    TTCore c(r0, n * m, r1);
    for (std::size_t a = 0; a < r0; ++a)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t b = 0; b < r1; ++b) c.data[a + r0 * (i + n * (j + m * b))] = get_f64(is);
    return c;
}

template <class F>
void with_output(const std::string& path, F&& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    f(os);
    if (!os) throw IoError("write failed for " + path);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    return is;
}

}  // namespace

void write_ttd1(std::ostream& os, const TTVector& v) {
    os.write("TTD1", 4);
    put_u64(os, v.order());
    for (std::size_t mu = 0; mu < v.order(); ++mu) put_u64(os, v.shape()[mu]);
    for (auto r : v.ranks()) put_u64(os, r);
    for (const auto& c : v.cores()) write_core(os, c, c.k, 1);
}

TTVector read_ttd1(std::istream& is) {
    expect_magic(is, "TTD1");
    const std::size_t d = get_u64(is);
    if (d == 0 || d > 64) throw IoError("implausible TT order in dump");
    std::vector<std::size_t> sizes(d), ranks(d + 1);
    for (auto& s : sizes) s = get_u64(is);
    for (auto& r : ranks) r = get_u64(is);
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < d; ++mu) cores.push_back(read_core(is, ranks[mu], sizes[mu], 1, ranks[mu + 1]));
    return TTVector(ModeShape(sizes), std::move(cores));
}

void write_tto1(std::ostream& os, const TTOperator& A) {
    os.write("TTO1", 4);
    put_u64(os, A.order());
    for (std::size_t mu = 0; mu < A.order(); ++mu) put_u64(os, A.row_shape()[mu]);
    for (std::size_t mu = 0; mu < A.order(); ++mu) put_u64(os, A.col_shape()[mu]);
    for (auto r : A.ranks()) put_u64(os, r);
    for (std::size_t mu = 0; mu < A.order(); ++mu) write_core(os, A.core(mu), A.row_shape()[mu], A.col_shape()[mu]);
}

TTOperator read_tto1(std::istream& is) {
    expect_magic(is, "TTO1");
    const std::size_t d = get_u64(is);
    if (d == 0 || d > 64) throw IoError("implausible TT order in dump");
    std::vector<std::size_t> rows(d), cols(d), ranks(d + 1);
    for (auto& s : rows) s = get_u64(is);
    for (auto& s : cols) s = get_u64(is);
    for (auto& r : ranks) r = get_u64(is);
    std::vector<TTCore> cores;
    for (std::size_t mu = 0; mu < d; ++mu) cores.push_back(read_core(is, ranks[mu], rows[mu], cols[mu], ranks[mu + 1]));
    return TTOperator(ModeShape(rows), ModeShape(cols), std::move(cores));
}

void write_ttd1(const std::string& path, const TTVector& v) {
    with_output(path, [&](std::ostream& os) { write_ttd1(os, v); });
}

void write_tto1(const std::string& path, const TTOperator& A) {
    with_output(path, [&](std::ostream& os) { write_tto1(os, A); });
}

TTVector read_ttd1(const std::string& path) {
    auto is = open_input(path);
    return read_ttd1(is);
}

TTOperator read_tto1(const std::string& path) {
    auto is = open_input(path);
    return read_tto1(is);
}

}  // namespace xfer
