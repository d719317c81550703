#pragma once
// Gaussian rationals and points of the projective line over Q(i).

#include <array>
#include <string>

#include "dmlab/errors.hpp"
#include "dmlab/rational.hpp"

namespace dmlab {

class GaussRat {
public:
    GaussRat() = default;
    GaussRat(long long re) : re_(re) {}  // NOLINT(implicit)
    GaussRat(Rational re) : re_(std::move(re)) {}  // NOLINT(implicit)
    GaussRat(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static GaussRat i() { return GaussRat(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }
    mpz_class re_num() const { return re_.num(); }
    mpz_class re_den() const { return re_.den(); }
    mpz_class im_num() const { return im_.num(); }
    mpz_class im_den() const { return im_.den(); }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_one() const { return re_.is_one() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    GaussRat conj() const { return GaussRat(re_, -im_); }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    GaussRat inverse() const {
        if (is_zero()) throw DivisionByZero("division by zero Gaussian rational");
        if (im_.is_zero()) return GaussRat(re_.inverse());
        Rational n = norm().inverse();
        return GaussRat(re_ * n, -(im_ * n));
    }

    friend GaussRat operator-(const GaussRat& x) { return GaussRat(-x.re_, -x.im_); }
    friend GaussRat operator+(const GaussRat& x, const GaussRat& y) {
        return GaussRat(x.re_ + y.re_, x.im_ + y.im_);
    }
    friend GaussRat operator-(const GaussRat& x, const GaussRat& y) {
        return GaussRat(x.re_ - y.re_, x.im_ - y.im_);
    }
    friend GaussRat operator*(const GaussRat& x, const GaussRat& y) {
        if (x.im_.is_zero()) return GaussRat(x.re_ * y.re_, x.re_ * y.im_);
        if (y.im_.is_zero()) return GaussRat(x.re_ * y.re_, x.im_ * y.re_);
        return GaussRat(x.re_ * y.re_ - x.im_ * y.im_, x.re_ * y.im_ + x.im_ * y.re_);
    }
    friend GaussRat operator/(const GaussRat& x, const GaussRat& y) { return x * y.inverse(); }
    GaussRat& operator+=(const GaussRat& o) { return *this = *this + o; }
    GaussRat& operator-=(const GaussRat& o) { return *this = *this - o; }
    GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }

    friend bool operator==(const GaussRat& x, const GaussRat& y) {
        return x.re_ == y.re_ && x.im_ == y.im_;
    }
    friend bool operator!=(const GaussRat& x, const GaussRat& y) { return !(x == y); }

    // "a/b+c/d*i"
    std::string str() const {
        std::string s = re_.str();
        if (im_.sign() < 0) s += "-" + (-im_).str();
        else s += "+" + im_.str();
        return s + "*i";
    }

    // Accepts "x", "x*i", "x+y*i", "x-y*i" with x, y rationals "n" or "n/d".
    static GaussRat parse(const std::string& text) {
        std::string s;
        for (char c : text)
            if (c != ' ') s += c;
        if (s.empty()) throw ParseError("empty Gaussian rational");
        bool has_i = s.size() >= 1 && s.back() == 'i';
        if (!has_i) return GaussRat(Rational::parse(s));
        std::string body = s.substr(0, s.size() - 1);
        if (!body.empty() && body.back() == '*') body.pop_back();
        // split at the last sign that is not the leading one
        std::size_t cut = std::string::npos;
        for (std::size_t k = body.size(); k-- > 1;) {
            if (body[k] == '+' || body[k] == '-') { cut = k; break; }
        }
        std::string re_s = cut == std::string::npos ? "0" : body.substr(0, cut);
        std::string im_s = cut == std::string::npos ? body : body.substr(cut);
        if (!im_s.empty() && im_s[0] == '+') im_s = im_s.substr(1);
        if (im_s.empty()) im_s = "1";
        if (im_s == "-") im_s = "-1";
        return GaussRat(Rational::parse(re_s), Rational::parse(im_s));
    }

private:
    Rational re_, im_;
};

// Point [a:b] of the projective line, stored in normal form.
class ProjPoint {
public:
    ProjPoint() : a_(0), b_(1) {}
    ProjPoint(GaussRat z) : a_(std::move(z)), b_(1) {}  // NOLINT(implicit)
    ProjPoint(long long z) : a_(z), b_(1) {}  // NOLINT(implicit)
    ProjPoint(const GaussRat& a, const GaussRat& b) {
        if (a.is_zero() && b.is_zero()) throw InvalidArgument("[0:0] is not a point");
        if (b.is_zero()) { a_ = GaussRat(1); b_ = GaussRat(0); }
        else if (b.is_one()) { a_ = a; b_ = b; }
        else { a_ = a / b; b_ = GaussRat(1); }
    }

    static ProjPoint inf() { return ProjPoint(GaussRat(1), GaussRat(0)); }

    const GaussRat& a() const { return a_; }
    const GaussRat& b() const { return b_; }
    bool is_inf() const { return b_.is_zero(); }
    bool is_zero() const { return !is_inf() && a_.is_zero(); }
    bool is_one() const { return !is_inf() && a_.is_one(); }
    // Finite value; throws at infinity.
    const GaussRat& value() const {
        if (is_inf()) throw DivisionByZero("value of the point at infinity");
        return a_;
    }

    ProjPoint conj() const { return is_inf() ? *this : ProjPoint(a_.conj()); }
    ProjPoint inverse() const {
        if (is_inf()) return ProjPoint(0);
        if (a_.is_zero()) return inf();
        return ProjPoint(a_.inverse());
    }
    ProjPoint one_minus() const {
        if (is_inf()) return *this;
        return ProjPoint(GaussRat(1) - a_);
    }

    friend bool operator==(const ProjPoint& x, const ProjPoint& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const ProjPoint& x, const ProjPoint& y) { return !(x == y); }

    std::string str() const {
        if (is_inf()) return "inf";
        return "[" + a_.str() + ":1]";
    }
    static ProjPoint parse(const std::string& text) {
        std::string s;
        for (char c : text)
            if (c != ' ') s += c;
        if (s == "inf" || s == "oo") return inf();
        if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
            std::string body = s.substr(1, s.size() - 2);
            auto colon = body.find(':');
            if (colon == std::string::npos) throw ParseError("bad point '" + text + "'");
            return ProjPoint(GaussRat::parse(body.substr(0, colon)),
                             GaussRat::parse(body.substr(colon + 1)));
        }
        return ProjPoint(GaussRat::parse(s));
    }

private:
    GaussRat a_, b_;
};

// Product on the projective line; 0*inf has no value.
inline ProjPoint proj_mul(const ProjPoint& x, const ProjPoint& y) {
    if ((x.is_zero() && y.is_inf()) || (x.is_inf() && y.is_zero()))
        throw Indeterminate("indeterminate product 0*inf");
    if (x.is_inf() || y.is_inf()) return ProjPoint::inf();
    if (x.is_one()) return y;
    if (y.is_one()) return x;
    return ProjPoint(x.a() * y.a());
}

// a*b' - a'*b, the homogeneous difference of two points.
inline GaussRat proj_det(const ProjPoint& z, const ProjPoint& w) {
    if (z.is_inf() && w.is_inf()) return GaussRat(0);
    if (z.is_inf()) return GaussRat(1);
    if (w.is_inf()) return GaussRat(-1);
    return z.a() - w.a();
}

// CR(z1,z2,z3,z4) = ((z1-z3)/(z1-z4)) : ((z2-z3)/(z2-z4)).
inline ProjPoint cross_ratio(const ProjPoint& z1, const ProjPoint& z2, const ProjPoint& z3,
                             const ProjPoint& z4) {
    const std::array<const ProjPoint*, 4> z{&z1, &z2, &z3, &z4};
    for (int p = 0; p < 4; ++p) {
        int same = 0;
        for (int q = 0; q < 4; ++q)
            if (q != p && *z[p] == *z[q]) ++same;
        if (same >= 2) throw UnstableConfiguration("unstable configuration");
    }
    GaussRat d13 = proj_det(z1, z3), d24 = proj_det(z2, z4);
    GaussRat d14 = proj_det(z1, z4), d23 = proj_det(z2, z3);
    GaussRat num = d13 * d24, den = d14 * d23;
    if (num.is_zero() && den.is_zero()) return ProjPoint(1);  // z1=z2, z3=z4
    return ProjPoint(num, den);
}

}  // namespace dmlab
