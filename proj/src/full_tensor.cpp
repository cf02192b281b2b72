#include "xfer/core/full_tensor.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xfer/error.hpp"

namespace xfer {

namespace {

void require_same(const ModeShape& a, const ModeShape& b, const char* op) {
    if (a != b)
        throw DimensionError(std::string(op) + ": shape mismatch " + a.to_string() + " vs " + b.to_string());
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

}  // namespace

FullTensor::FullTensor(ModeShape shape) : shape_(std::move(shape)), data_(shape_.total(), 0.0) {}

FullTensor::FullTensor(ModeShape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.total())
        throw DimensionError("FullTensor data length " + std::to_string(data_.size()) + " does not match shape " +
                             shape_.to_string());
}

FullTensor FullTensor::unit(const ModeShape& shape, const MultiIndex& i) {
    FullTensor t(shape);
    t(i) = 1.0;
    return t;
}

double& FullTensor::operator()(const MultiIndex& i) { return data_[multiindex_to_linear(i, shape_) - 1]; }
double FullTensor::operator()(const MultiIndex& i) const { return data_[multiindex_to_linear(i, shape_) - 1]; }

FullOperator::FullOperator(ModeShape rows, ModeShape cols)
    : rows_(std::move(rows)), cols_(std::move(cols)), data_(rows_.total() * cols_.total(), 0.0) {}

FullOperator::FullOperator(ModeShape rows, ModeShape cols, std::vector<double> data)
    : rows_(std::move(rows)), cols_(std::move(cols)), data_(std::move(data)) {
    if (data_.size() != rows_.total() * cols_.total())
        throw DimensionError("FullOperator data length does not match " + rows_.to_string() + "x" + cols_.to_string());
}

FullOperator FullOperator::identity(const ModeShape& shape) {
    FullOperator I(shape, shape);
    for (std::size_t k = 0; k < shape.total(); ++k) I.at0(k, k) = 1.0;
    return I;
}

FullOperator FullOperator::from_matrix(const ModeShape& rows, const ModeShape& cols, const Eigen::MatrixXd& m) {
    if (static_cast<std::size_t>(m.rows()) != rows.total() || static_cast<std::size_t>(m.cols()) != cols.total())
        throw DimensionError("matrix size does not match operator shapes");
    FullOperator A(rows, cols);
    A.matrix() = m;
    return A;
}

double& FullOperator::operator()(const MultiIndex& i, const MultiIndex& j) {
    return at0(multiindex_to_linear(i, rows_) - 1, multiindex_to_linear(j, cols_) - 1);
}

double FullOperator::operator()(const MultiIndex& i, const MultiIndex& j) const {
    return at0(multiindex_to_linear(i, rows_) - 1, multiindex_to_linear(j, cols_) - 1);
}

Eigen::Map<const Eigen::MatrixXd> FullOperator::matrix() const {
    return {data_.data(), static_cast<Eigen::Index>(rows_.total()), static_cast<Eigen::Index>(cols_.total())};
}

Eigen::Map<Eigen::MatrixXd> FullOperator::matrix() {
    return {data_.data(), static_cast<Eigen::Index>(rows_.total()), static_cast<Eigen::Index>(cols_.total())};
}

std::vector<double> vectorize(const FullTensor& v) { return v.data(); }

double inner(const FullTensor& v, const FullTensor& w) {
    require_same(v.shape(), w.shape(), "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[k] * w[k];
    return s;
}

double norm(const FullTensor& v) { return std::sqrt(inner(v, v)); }

FullOperator outer(const FullTensor& v, const FullTensor& w) {
    FullOperator out(v.shape(), w.shape());
    const std::size_t R = v.size();
    for (std::size_t j = 0; j < w.size(); ++j)
        for (std::size_t i = 0; i < R; ++i) out.data()[i + R * j] = v[i] * w[j];
    return out;
}

FullTensor apply(const FullOperator& A, const FullTensor& v) {
    require_same(A.col_shape(), v.shape(), "apply");
    FullTensor out(A.row_shape());
    out.vec().noalias() = A.matrix() * v.vec();
    return out;
}

FullTensor axpy(double alpha, const FullTensor& v, const FullTensor& w) {
    require_same(v.shape(), w.shape(), "axpy");
    FullTensor out(w);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = alpha * v[k] + w[k];
    return out;
}

FullTensor scale(double alpha, const FullTensor& v) {
    FullTensor out(v);
    for (auto& x : out.data()) x *= alpha;
    return out;
}

FullOperator transpose(const FullOperator& A) {
    FullOperator out(A.col_shape(), A.row_shape());
    out.matrix() = A.matrix().transpose();
    return out;
}

FullOperator axpy(double alpha, const FullOperator& A, const FullOperator& B) {
    require_same(A.row_shape(), B.row_shape(), "axpy");
    require_same(A.col_shape(), B.col_shape(), "axpy");
    FullOperator out(B);
    for (std::size_t k = 0; k < out.data().size(); ++k) out.data()[k] = alpha * A.data()[k] + B.data()[k];
    return out;
}

void write_csv(std::ostream& os, const FullTensor& v) {
    const std::size_t d = v.shape().order();
    for (std::size_t mu = 0; mu < d; ++mu) os << 'i' << (mu + 1) << ',';
    os << "value\n";
    std::vector<std::size_t> idx(d);
    for (std::size_t k = 0; k < v.size(); ++k) {
        unravel0(k, v.shape(), idx.data());
        for (std::size_t mu = 0; mu < d; ++mu) os << (idx[mu] + 1) << ',';
        os << fmt17(v[k]) << '\n';
    }
}

void write_csv(const std::string& path, const FullTensor& v) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    write_csv(os, v);
}

FullTensor read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty tensor CSV");
    const auto header = split(line, ',');
    if (header.size() < 2 || header.back() != "value") throw IoError("tensor CSV header must end with 'value'");
    const std::size_t d = header.size() - 1;
    std::vector<MultiIndex> idx;
    std::vector<double> vals;
    std::vector<std::size_t> sizes(d, 0);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != d + 1) throw IoError("tensor CSV row has wrong field count: " + line);
        MultiIndex i(d);
        for (std::size_t mu = 0; mu < d; ++mu) {
            i[mu] = std::stoul(f[mu]);
            sizes[mu] = std::max(sizes[mu], i[mu]);
        }
        idx.push_back(std::move(i));
        vals.push_back(std::stod(f[d]));
    }
    FullTensor t{ModeShape(sizes)};
    if (idx.size() != t.size()) throw IoError("tensor CSV does not list every entry exactly once");
    for (std::size_t k = 0; k < idx.size(); ++k) t(idx[k]) = vals[k];
    return t;
}

FullTensor read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    return read_csv(is);
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << fmt17(m(i, j));
        os << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> r;
        for (const auto& f : split(line, ',')) r.push_back(std::stod(f));
        if (!rows.empty() && r.size() != rows.front().size()) throw IoError("ragged matrix CSV " + path);
        rows.push_back(std::move(r));
    }
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

}  // namespace xfer
