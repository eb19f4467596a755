#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cstrain {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;
using MatrixMap = Eigen::Map<RowMajorMatrix>;

/// Dense real matrix with row-major storage. Constructors reject empty
/// shapes and non-finite entries; mutation through map() is unchecked.
class DenseMatrix {
public:
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static DenseMatrix from_eigen(const Eigen::MatrixXd& m);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }
    double& operator()(std::size_t i, std::size_t j) {
        return entries_[i * cols_ + j];
    }

    const std::vector<double>& entries() const noexcept { return entries_; }

    ConstMatrixMap map() const {
        return ConstMatrixMap(entries_.data(), static_cast<Eigen::Index>(rows_),
                              static_cast<Eigen::Index>(cols_));
    }
    MatrixMap map() {
        return MatrixMap(entries_.data(), static_cast<Eigen::Index>(rows_),
                         static_cast<Eigen::Index>(cols_));
    }

    Eigen::MatrixXd to_eigen() const { return map(); }
    Eigen::VectorXd col_vector(std::size_t j) const { return map().col(j); }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;  // row-major, rows_*cols_
};

// Text format shared by all tools: line 1 "# dense <rows> <cols>", then
// <rows> lines of <cols> whitespace-separated decimals, 17 significant
// digits, '.' decimal separator regardless of locale.
void write_matrix_text(const DenseMatrix& m, std::ostream& out);
void write_matrix_text(const DenseMatrix& m, const std::string& path);
DenseMatrix read_matrix_text(std::istream& in);
DenseMatrix read_matrix_text(const std::string& path);

// Vectors travel as n-by-1 matrices.
void write_vector_text(const Eigen::VectorXd& v, const std::string& path);
Eigen::VectorXd read_vector_text(const std::string& path);

}  // namespace cstrain
