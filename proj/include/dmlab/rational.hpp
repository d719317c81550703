#pragma once
// Exact rational numbers. Values that fit in int64 are handled inline with
// 128-bit intermediates; anything larger is carried by GMP.

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "dmlab/errors.hpp"

namespace dmlab {

namespace detail {

using i128 = __int128;
using u128 = unsigned __int128;

inline u128 uabs128(i128 x) { return x < 0 ? u128(-(x + 1)) + 1 : u128(x); }

inline std::uint64_t ugcd64(std::uint64_t x, std::uint64_t y) {
    if (x == 0) return y;
    if (y == 0) return x;
    int shift = __builtin_ctzll(x | y);
    x >>= __builtin_ctzll(x);
    do {
        y >>= __builtin_ctzll(y);
        if (x > y) { std::uint64_t t = x; x = y; y = t; }
        y -= x;
    } while (y != 0);
    return x << shift;
}

inline u128 gcd128(u128 a, u128 b) {
    if ((a >> 64) == 0 && (b >> 64) == 0) return ugcd64(std::uint64_t(a), std::uint64_t(b));
    if (a == 0) return b;
    if (b == 0) return a;
    int shift = 0;
    while (((a | b) & 1) == 0) { a >>= 1; b >>= 1; ++shift; }
    while ((a & 1) == 0) a >>= 1;
    do {
        while ((b & 1) == 0) b >>= 1;
        if (a > b) { u128 t = a; a = b; b = t; }
        b -= a;
    } while (b != 0);
    return a << shift;
}

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    std::uint64_t x = a < 0 ? std::uint64_t(-(a + 1)) + 1 : std::uint64_t(a);
    std::uint64_t y = b < 0 ? std::uint64_t(-(b + 1)) + 1 : std::uint64_t(b);
    return std::int64_t(ugcd64(x, y));
}

constexpr i128 kMax = INT64_MAX;

inline bool fits(i128 x) { return x >= -kMax && x <= kMax; }

inline mpz_class to_mpz(i128 x) {
    bool neg = x < 0;
    u128 u = uabs128(x);
    mpz_class hi = static_cast<unsigned long>(std::uint64_t(u >> 64));
    mpz_class lo = static_cast<unsigned long>(std::uint64_t(u));
    mpz_class r = (hi << 64) + lo;
    return neg ? mpz_class(-r) : r;
}

}  // namespace detail

class Rational {
public:
    Rational() = default;
    Rational(long long n) : n_(n), d_(1) {  // NOLINT(implicit)
        if (n == INT64_MIN) set_big(mpq_class(mpz_class(std::to_string(n))));
    }
    Rational(long long n, long long d) {
        if (d == 0) throw DivisionByZero("rational with zero denominator");
        set_reduced(n, d);
    }
    explicit Rational(const mpq_class& q) { set_big(q); }

    Rational(const Rational& o) : n_(o.n_), d_(o.d_) {
        if (o.big_) big_ = std::make_unique<mpq_class>(*o.big_);
    }
    Rational(Rational&&) noexcept = default;
    Rational& operator=(const Rational& o) {
        if (this != &o) {
            n_ = o.n_; d_ = o.d_;
            big_ = o.big_ ? std::make_unique<mpq_class>(*o.big_) : nullptr;
        }
        return *this;
    }
    Rational& operator=(Rational&&) noexcept = default;

    bool is_small() const { return !big_; }
    bool is_zero() const { return !big_ && n_ == 0; }
    bool is_one() const { return !big_ && n_ == 1 && d_ == 1; }
    int sign() const {
        if (big_) return sgn(*big_);
        return (n_ > 0) - (n_ < 0);
    }

    mpq_class to_mpq() const {
        if (big_) return *big_;
        mpq_class q(mpz_class(std::to_string(n_)), mpz_class(std::to_string(d_)));
        q.canonicalize();
        return q;
    }
    mpz_class num() const { return to_mpq().get_num(); }
    mpz_class den() const { return to_mpq().get_den(); }

    std::string str() const {
        if (big_) return big_->get_num().get_str() + "/" + big_->get_den().get_str();
        return std::to_string(n_) + "/" + std::to_string(d_);
    }

    // Accepts "n", "n/d" with optional sign.
    static Rational parse(const std::string& s) {
        if (s.empty()) throw ParseError("empty rational");
        auto slash = s.find('/');
        std::string a = s.substr(0, slash);
        std::string b = slash == std::string::npos ? "1" : s.substr(slash + 1);
        if (!valid_int(a) || !valid_int(b)) throw ParseError("bad rational '" + s + "'");
        if (a[0] == '+') a = a.substr(1);
        if (b[0] == '+') b = b.substr(1);
        mpz_class n(a, 10), d(b, 10);
        if (d == 0) throw DivisionByZero("rational with zero denominator");
        mpq_class q(n, d);
        q.canonicalize();
        return Rational(q);
    }

    friend Rational operator-(const Rational& x) {
        if (x.big_) return Rational(mpq_class(-*x.big_));
        Rational r; r.n_ = -x.n_; r.d_ = x.d_; return r;
    }
    friend Rational operator+(const Rational& x, const Rational& y) {
        if (!x.big_ && !y.big_) {
            if (x.n_ == 0) return y;
            if (y.n_ == 0) return x;
            if (x.d_ == y.d_) return from128(detail::i128(x.n_) + y.n_, x.d_);
            detail::i128 n = detail::i128(x.n_) * y.d_ + detail::i128(y.n_) * x.d_;
            detail::i128 d = detail::i128(x.d_) * y.d_;
            return from128(n, d);
        }
        return Rational(mpq_class(x.to_mpq() + y.to_mpq()));
    }
    friend Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }
    friend Rational operator*(const Rational& x, const Rational& y) {
        if (!x.big_ && !y.big_) {
            if (x.n_ == 0 || y.n_ == 0) return Rational();
            std::int64_t g1 = detail::gcd64(x.n_, y.d_), g2 = detail::gcd64(y.n_, x.d_);
            detail::i128 n = detail::i128(x.n_ / g1) * (y.n_ / g2);
            detail::i128 d = detail::i128(x.d_ / g2) * (y.d_ / g1);
            if (detail::fits(n) && detail::fits(d)) {
                Rational r; r.n_ = std::int64_t(n); r.d_ = std::int64_t(d); return r;
            }
            return big128(n, d);
        }
        return Rational(mpq_class(x.to_mpq() * y.to_mpq()));
    }
    friend Rational operator/(const Rational& x, const Rational& y) {
        if (y.is_zero()) throw DivisionByZero("division by zero");
        return x * y.inverse();
    }
    Rational inverse() const {
        if (is_zero()) throw DivisionByZero("inverse of zero");
        if (big_) { mpq_class q = 1 / *big_; return Rational(q); }
        Rational r;
        r.n_ = n_ < 0 ? -d_ : d_;
        r.d_ = n_ < 0 ? -n_ : n_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& x, const Rational& y) {
        if (!x.big_ && !y.big_) return x.n_ == y.n_ && x.d_ == y.d_;
        if (x.big_ && y.big_) return *x.big_ == *y.big_;
        return false;  // canonical: big values never fit in the small range
    }
    friend bool operator!=(const Rational& x, const Rational& y) { return !(x == y); }
    friend bool operator<(const Rational& x, const Rational& y) {
        if (!x.big_ && !y.big_)
            return detail::i128(x.n_) * y.d_ < detail::i128(y.n_) * x.d_;
        return x.to_mpq() < y.to_mpq();
    }

    // Magnitude bound used by samplers: max(|num|, den) if small, else huge.
    std::int64_t height() const {
        if (big_) return INT64_MAX;
        return std::max(n_ < 0 ? -n_ : n_, d_);
    }

private:
    std::int64_t n_ = 0, d_ = 1;
    std::unique_ptr<mpq_class> big_;

    static bool valid_int(const std::string& s) {
        std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    }

    void set_reduced(long long n, long long d) {
        from128_into(*this, n, d);
    }

    void set_big(const mpq_class& q) {
        if (q.get_num().fits_slong_p() && q.get_den().fits_slong_p() &&
            q.get_num() != LONG_MIN) {
            n_ = q.get_num().get_si();
            d_ = q.get_den().get_si();
            big_.reset();
        } else {
            big_ = std::make_unique<mpq_class>(q);
            n_ = 0; d_ = 1;
        }
    }

    static Rational big128(detail::i128 n, detail::i128 d) {
        mpq_class q(detail::to_mpz(n), detail::to_mpz(d));
        q.canonicalize();
        return Rational(q);
    }

    static void from128_into(Rational& r, detail::i128 n, detail::i128 d) {
        if (d < 0) { n = -n; d = -d; }
        detail::u128 g = detail::gcd128(detail::uabs128(n), detail::u128(d));
        if (g > 1) { n /= detail::i128(g); d /= detail::i128(g); }
        if (detail::fits(n) && detail::fits(d)) {
            r.n_ = std::int64_t(n); r.d_ = std::int64_t(d); r.big_.reset();
        } else {
            r = big128(n, d);
        }
    }

    static Rational from128(detail::i128 n, detail::i128 d) {
        Rational r;
        from128_into(r, n, d);
        return r;
    }
};

}  // namespace dmlab
