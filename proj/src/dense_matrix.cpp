#include "cstrain/dense_matrix.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cstrain/errors.hpp"

namespace cstrain {

namespace {

void check_shape(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0)
        fail("BadShape", "matrix dimensions must be positive");
}

void check_finite(const std::vector<double>& entries) {
    for (double v : entries)
        if (!std::isfinite(v))
            fail("NonFinite", "non-finite matrix entry");
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    check_shape(rows, cols);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    check_shape(rows, cols);
    if (entries_.size() != rows_ * cols_)
        fail("BadShape", "entry count does not match rows*cols");
    check_finite(entries_);
}

DenseMatrix DenseMatrix::from_eigen(const Eigen::MatrixXd& m) {
    DenseMatrix out(static_cast<std::size_t>(m.rows()),
                    static_cast<std::size_t>(m.cols()));
    out.map() = m;
    check_finite(out.entries_);
    return out;
}

void write_matrix_text(const DenseMatrix& m, std::ostream& out) {
    out << "# dense " << m.rows() << " " << m.cols() << "\n";
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

void write_matrix_text(const DenseMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) fail("IoError", "cannot open for writing: " + path);
    write_matrix_text(m, f);
    if (!f) fail("IoError", "write failed: " + path);
}

namespace {

double parse_double(const std::string& tok, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail("IoError", "bad numeric token '" + tok + "' in " + context);
    return v;
}

}  // namespace

DenseMatrix read_matrix_text(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) fail("IoError", "empty matrix stream");
    std::istringstream header(line);
    std::string hash, kind;
    std::size_t rows = 0, cols = 0;
    header >> hash >> kind >> rows >> cols;
    if (hash != "#" || kind != "dense" || header.fail())
        fail("IoError", "bad matrix header: " + line);
    if (rows == 0 || cols == 0) fail("IoError", "bad matrix shape in header");

    std::vector<double> entries;
    entries.reserve(rows * cols);
    std::string tok;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line))
            fail("IoError", "matrix truncated at row " + std::to_string(i));
        std::istringstream row(line);
        for (std::size_t j = 0; j < cols; ++j) {
            if (!(row >> tok))
                fail("IoError", "matrix row " + std::to_string(i) + " too short");
            entries.push_back(parse_double(tok, "matrix row " + std::to_string(i)));
        }
        if (row >> tok)
            fail("IoError", "matrix row " + std::to_string(i) + " too long");
    }
    return DenseMatrix(rows, cols, std::move(entries));
}

DenseMatrix read_matrix_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("IoError", "cannot open for reading: " + path);
    return read_matrix_text(f);
}

void write_vector_text(const Eigen::VectorXd& v, const std::string& path) {
    DenseMatrix m(static_cast<std::size_t>(v.size()), 1);
    m.map().col(0) = v;
    write_matrix_text(m, path);
}

Eigen::VectorXd read_vector_text(const std::string& path) {
    DenseMatrix m = read_matrix_text(path);
    if (m.cols() != 1) fail("IoError", "expected a column vector in " + path);
    return m.col_vector(0);
}

}  // namespace cstrain
