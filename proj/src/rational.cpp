#include "netham/rational.hpp"

#include <cctype>

namespace netham {

std::string to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

namespace {

BigInt pow10(unsigned n) {
    BigInt p = 1;
    for (unsigned i = 0; i < n; ++i) p *= 10;
    return p;
}

// Parse a plain decimal (optionally signed, optional fraction, optional
// exponent) into an exact rational. `pos` advances past what was consumed.
Rational parse_decimal(const std::string& s, size_t& pos) {
    size_t n = s.size();
    bool neg = false;
    if (pos < n && (s[pos] == '+' || s[pos] == '-')) neg = (s[pos++] == '-');

    BigInt mantissa = 0;
    unsigned frac_digits = 0;
    bool any_digit = false;
    while (pos < n && std::isdigit(static_cast<unsigned char>(s[pos]))) {
        mantissa = mantissa * 10 + (s[pos++] - '0');
        any_digit = true;
    }
    if (pos < n && s[pos] == '.') {
        ++pos;
        while (pos < n && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            mantissa = mantissa * 10 + (s[pos++] - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    if (!any_digit) throw std::invalid_argument("not a number: '" + s + "'");

    long exponent = 0;
    if (pos < n && (s[pos] == 'e' || s[pos] == 'E')) {
        ++pos;
        bool eneg = false;
        if (pos < n && (s[pos] == '+' || s[pos] == '-')) eneg = (s[pos++] == '-');
        if (pos >= n || !std::isdigit(static_cast<unsigned char>(s[pos])))
            throw std::invalid_argument("bad exponent in '" + s + "'");
        while (pos < n && std::isdigit(static_cast<unsigned char>(s[pos])))
            exponent = exponent * 10 + (s[pos++] - '0');
        if (eneg) exponent = -exponent;
    }

    long net = exponent - static_cast<long>(frac_digits);
    Rational r(mantissa);
    if (net > 0)
        r *= Rational(pow10(static_cast<unsigned>(net)));
    else if (net < 0)
        r /= Rational(pow10(static_cast<unsigned>(-net)));
    return neg ? -r : r;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    size_t pos = 0;
    Rational num = parse_decimal(text, pos);
    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        Rational den = parse_decimal(text, pos);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        num /= den;
    }
    if (pos != text.size())
        throw std::invalid_argument("trailing characters in '" + text + "'");
    return num;
}

Rref rref(RMat a) {
    const Eigen::Index rows = a.rows(), cols = a.cols();
    Rref out;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        // pick pivot: largest |entry| in column c at/below row r
        Eigen::Index pivot = -1;
        Rational best = 0;
        for (Eigen::Index i = r; i < rows; ++i) {
            Rational mag = abs(a(i, c));
            if (mag > best) { best = mag; pivot = i; }
        }
        if (pivot < 0) continue;
        if (pivot != r) a.row(pivot).swap(a.row(r));
        a.row(r) /= a(r, c);
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i == r || a(i, c) == 0) continue;
            a.row(i) -= a(i, c) * a.row(r);
        }
        out.pivot_cols.push_back(static_cast<int>(c));
        ++r;
    }
    out.rank = static_cast<int>(r);
    out.mat = std::move(a);
    return out;
}

int rank(const RMat& a) { return rref(a).rank; }

Kernel kernel(const RMat& a) {
    Rref e = rref(a);
    const Eigen::Index cols = a.cols();
    Kernel out;
    for (int c = 0; c < cols; ++c)
        if (!e.is_pivot_col(c)) out.free_cols.push_back(c);
    out.basis = RMat::Zero(cols, static_cast<Eigen::Index>(out.free_cols.size()));
    for (size_t k = 0; k < out.free_cols.size(); ++k) {
        int fc = out.free_cols[k];
        out.basis(fc, static_cast<Eigen::Index>(k)) = 1;
        for (int p = 0; p < e.rank; ++p)
            out.basis(e.pivot_cols[static_cast<size_t>(p)], static_cast<Eigen::Index>(k)) =
                -e.mat(p, fc);
    }
    return out;
}

RMat solve(const RMat& a, const RMat& b) {
    if (a.rows() != b.rows()) throw std::domain_error("solve: shape mismatch");
    RMat aug(a.rows(), a.cols() + b.cols());
    aug.block(0, 0, a.rows(), a.cols()) = a;
    aug.block(0, a.cols(), b.rows(), b.cols()) = b;
    Rref e = rref(std::move(aug));
    // consistent + unique requires rank(a) == cols(a) and no pivot in b block
    for (int p : e.pivot_cols)
        if (p >= a.cols()) throw std::domain_error("solve: inconsistent system");
    if (e.rank != a.cols()) throw std::domain_error("solve: singular system");
    RMat x(a.cols(), b.cols());
    for (int p = 0; p < e.rank; ++p)
        x.row(e.pivot_cols[static_cast<size_t>(p)]) =
            e.mat.block(p, a.cols(), 1, b.cols());
    return x;
}

RMat inverse(const RMat& a) {
    if (a.rows() != a.cols()) throw std::domain_error("inverse: not square");
    return solve(a, RMat::Identity(a.rows(), a.cols()));
}

IMat integer_kernel(IMat a) {
    const Eigen::Index n = a.cols();
    IMat u = IMat::Identity(n, n);
    Eigen::Index lead = 0;  // columns < lead hold pivots of processed rows
    for (Eigen::Index row = 0; row < a.rows() && lead < n; ++row) {
        Eigen::Index p = -1;
        for (Eigen::Index j = lead; j < n; ++j)
            if (a(row, j) != 0) { p = j; break; }
        if (p < 0) continue;
        if (p != lead) {
            a.col(p).swap(a.col(lead));
            u.col(p).swap(u.col(lead));
        }
        // Euclidean elimination: zero a(row, j) for j > lead using column
        // operations with integer quotients (gcd loop), all unimodular.
        for (Eigen::Index j = lead + 1; j < n; ++j) {
            while (a(row, j) != 0) {
                BigInt q = a(row, lead) / a(row, j);
                if (q != 0) {
                    a.col(lead) -= q * a.col(j);
                    u.col(lead) -= q * u.col(j);
                }
                a.col(lead).swap(a.col(j));
                u.col(lead).swap(u.col(j));
            }
        }
        ++lead;
    }
    return u.rightCols(n - lead);
}

IMat clear_denominators(const RMat& a) {
    IMat out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        BigInt mult = 1;
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            mult = boost::multiprecision::lcm(mult, denominator(a(i, j)));
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            Rational v = a(i, j) * mult;
            out(i, j) = numerator(v);
        }
    }
    return out;
}

Eigen::MatrixXd to_double(const RMat& a) {
    Eigen::MatrixXd d(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = to_double(a(i, j));
    return d;
}

}  // namespace netham
