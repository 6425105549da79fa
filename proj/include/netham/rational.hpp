#pragma once
// rational.hpp — exact rational scalar type and dense exact linear algebra.
//
// The constraint/kernel stage of the reduction is exact by contract: kernel
// dimensions are structural facts and floating point can misreport rank.
// Everything here is boost::multiprecision::cpp_rational inside Eigen dense
// matrices; floats only appear when a caller explicitly converts.

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netham {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using RMat = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RVec = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RRowVec = Eigen::Matrix<Rational, 1, Eigen::Dynamic>;
using IMat = Eigen::Matrix<BigInt, Eigen::Dynamic, Eigen::Dynamic>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r);

// Parse "3", "-2", "3/4", "2.5", "1e-12", "-4.7e3". Decimal strings convert
// exactly (no binary rounding). Throws std::invalid_argument on junk.
Rational parse_rational(const std::string& text);

// Reduced row echelon form with exact arithmetic. Pivot selection: within the
// current column, the row whose entry has the largest rational magnitude;
// ties broken by smallest row index. Columns are scanned left to right
// (tie-break by smallest column index is implicit in the scan order).
struct Rref {
    RMat mat;                    // echelon form, pivot entries normalized to 1
    std::vector<int> pivot_cols; // one per pivot row, ascending
    int rank = 0;

    bool is_pivot_col(int c) const {
        for (int p : pivot_cols)
            if (p == c) return true;
        return false;
    }
};

Rref rref(RMat a);

int rank(const RMat& a);

// Columns span the exact nullspace {x : a x = 0}. Each basis column carries a
// unit entry at its free column, so the free-column index labels the vector.
// Also reports which columns are free, in ascending order.
struct Kernel {
    RMat basis;                  // (cols(a)) x (nullity)
    std::vector<int> free_cols;  // one per basis column
};

Kernel kernel(const RMat& a);

// Exact inverse / linear solve; throw std::domain_error when singular.
RMat inverse(const RMat& a);
RMat solve(const RMat& a, const RMat& b);

// Integer (saturated) kernel lattice: columns form a basis of
// {v in Z^n : a v = 0} such that every integer kernel vector is an integer
// combination of them. Computed by unimodular column reduction (Euclidean
// column echelon form), so the basis extends to a basis of Z^n.
IMat integer_kernel(IMat a);

// Scale each row of a rational matrix by the lcm of its denominators (times
// the sign keeping the leading entry's sign), producing an integer matrix
// with the same row space and the same integer kernel.
IMat clear_denominators(const RMat& a);

inline bool is_zero(const RMat& a) {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (a(i, j) != 0) return false;
    return true;
}

// Convert a whole matrix to double (spectral stage boundary).
Eigen::MatrixXd to_double(const RMat& a);

}  // namespace netham
