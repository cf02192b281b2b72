#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "xfer/core/mode_shape.hpp"

namespace xfer {

/// Largest number of entries a format may be expanded to in full storage.
inline constexpr std::size_t kDefaultDensifyGuard = 10'000'000;

/// Dense tensor, stored first index fastest so the flat data is its vectorization.
class FullTensor {
public:
    FullTensor() = default;
    explicit FullTensor(ModeShape shape);
    FullTensor(ModeShape shape, std::vector<double> data);

    static FullTensor unit(const ModeShape& shape, const MultiIndex& i);

    const ModeShape& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(const MultiIndex& i);
    double operator()(const MultiIndex& i) const;
    double& operator[](std::size_t lin0) { return data_[lin0]; }
    double operator[](std::size_t lin0) const { return data_[lin0]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Eigen::Map<const Eigen::VectorXd> vec() const { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
    Eigen::Map<Eigen::VectorXd> vec() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }

private:
    ModeShape shape_;
    std::vector<double> data_;
};

/// Dense operator on a tensor space. Entry [i, j] sits at î + R ĵ (zero based), so the data is the
/// column-major matricization.
class FullOperator {
public:
    FullOperator() = default;
    FullOperator(ModeShape rows, ModeShape cols);
    FullOperator(ModeShape rows, ModeShape cols, std::vector<double> data);

    static FullOperator identity(const ModeShape& shape);
    static FullOperator from_matrix(const ModeShape& rows, const ModeShape& cols, const Eigen::MatrixXd& m);

    const ModeShape& row_shape() const { return rows_; }
    const ModeShape& col_shape() const { return cols_; }

    double& operator()(const MultiIndex& i, const MultiIndex& j);
    double operator()(const MultiIndex& i, const MultiIndex& j) const;
    double& at0(std::size_t row, std::size_t col) { return data_[row + rows_.total() * col]; }
    double at0(std::size_t row, std::size_t col) const { return data_[row + rows_.total() * col]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Eigen::Map<const Eigen::MatrixXd> matrix() const;
    Eigen::Map<Eigen::MatrixXd> matrix();

private:
    ModeShape rows_, cols_;
    std::vector<double> data_;
};

/// Flat vector in linear-index order; the identity on storage.
std::vector<double> vectorize(const FullTensor& v);

double inner(const FullTensor& v, const FullTensor& w);
double norm(const FullTensor& v);
FullOperator outer(const FullTensor& v, const FullTensor& w);
FullTensor apply(const FullOperator& A, const FullTensor& v);
FullTensor axpy(double alpha, const FullTensor& v, const FullTensor& w);
FullTensor scale(double alpha, const FullTensor& v);
FullOperator transpose(const FullOperator& A);
FullOperator axpy(double alpha, const FullOperator& A, const FullOperator& B);

/// CSV with header i1,...,id,value; rows in linear-index order; 17 significant digits.
void write_csv(std::ostream& os, const FullTensor& v);
void write_csv(const std::string& path, const FullTensor& v);
FullTensor read_csv(std::istream& is);
FullTensor read_csv(const std::string& path);

/// Plain comma-separated matrix, one row per line, 17 significant digits.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace xfer
