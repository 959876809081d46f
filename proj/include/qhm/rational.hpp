#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qhm {

/// Exact rational number. Thin value wrapper around GMP's mpq_class;
/// canonical form is maintained by every constructor and operation.
class rat {
public:
    rat() : q_(0) {}
    rat(long num, long den) : q_(num, den) {
        if (den == 0) throw std::invalid_argument("rat: zero denominator");
        q_.canonicalize();
    }
    // NOLINTNEXTLINE(google-explicit-constructor): integers promote freely
    rat(long n) : q_(n) {}
    rat(int n) : q_(n) {}

    /// Parses "p/q", "p", decimal ("0.25") or scientific ("1e-9") notation.
    static rat parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("rat: empty string");
        if (s.find('/') != std::string::npos) {
            mpq_class q;
            if (q.set_str(s, 10) != 0)
                throw std::invalid_argument("rat: bad literal '" + s + "'");
            if (q.get_den() == 0) throw std::invalid_argument("rat: zero denominator");
            q.canonicalize();
            return rat(q);
        }
        // decimal / scientific
        std::size_t epos = s.find_first_of("eE");
        std::string mant = s.substr(0, epos);
        long expo = 0;
        if (epos != std::string::npos) expo = std::stol(s.substr(epos + 1));
        bool neg = false;
        std::size_t i = 0;
        if (i < mant.size() && (mant[i] == '+' || mant[i] == '-')) neg = mant[i++] == '-';
        std::string digits;
        long frac_digits = 0;
        bool seen_dot = false, seen_digit = false;
        for (; i < mant.size(); ++i) {
            char c = mant[i];
            if (c == '.') {
                if (seen_dot) throw std::invalid_argument("rat: bad literal '" + s + "'");
                seen_dot = true;
            } else if (c >= '0' && c <= '9') {
                digits.push_back(c);
                seen_digit = true;
                if (seen_dot) ++frac_digits;
            } else {
                throw std::invalid_argument("rat: bad literal '" + s + "'");
            }
        }
        if (!seen_digit) throw std::invalid_argument("rat: bad literal '" + s + "'");
        mpz_class num(digits.empty() ? "0" : digits, 10);
        mpq_class q(num);
        long shift = expo - frac_digits;
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
        if (shift >= 0)
            q *= mpq_class(pow10);
        else
            q /= mpq_class(pow10);
        if (neg) q = -q;
        q.canonicalize();
        return rat(q);
    }

    /// Canonical "p/q" (or plain "p" for integers).
    std::string str() const {
        mpq_class c = q_;
        c.canonicalize();
        return c.get_str();
    }

    double to_double() const { return q_.get_d(); }

    friend rat operator+(const rat& a, const rat& b) { return rat(mpq_class(a.q_ + b.q_)); }
    friend rat operator-(const rat& a, const rat& b) { return rat(mpq_class(a.q_ - b.q_)); }
    friend rat operator*(const rat& a, const rat& b) { return rat(mpq_class(a.q_ * b.q_)); }
    friend rat operator/(const rat& a, const rat& b) {
        if (b.q_ == 0) throw std::domain_error("rat: division by zero");
        return rat(mpq_class(a.q_ / b.q_));
    }
    rat operator-() const { return rat(mpq_class(-q_)); }
    rat& operator+=(const rat& b) { q_ += b.q_; return *this; }
    rat& operator-=(const rat& b) { q_ -= b.q_; return *this; }
    rat& operator*=(const rat& b) { q_ *= b.q_; return *this; }

    friend bool operator==(const rat& a, const rat& b) { return a.q_ == b.q_; }
    friend bool operator!=(const rat& a, const rat& b) { return a.q_ != b.q_; }
    friend bool operator<(const rat& a, const rat& b) { return a.q_ < b.q_; }
    friend bool operator<=(const rat& a, const rat& b) { return a.q_ <= b.q_; }
    friend bool operator>(const rat& a, const rat& b) { return a.q_ > b.q_; }
    friend bool operator>=(const rat& a, const rat& b) { return a.q_ >= b.q_; }

    friend rat min(const rat& a, const rat& b) { return a <= b ? a : b; }
    friend rat max(const rat& a, const rat& b) { return a >= b ? a : b; }
    friend rat abs(const rat& a) { return a < rat(0) ? -a : a; }

    int sign() const { return sgn(q_); }

private:
    explicit rat(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
    mpq_class q_;
};

inline rat clamp01(const rat& x) {
    if (x < rat(0)) return rat(0);
    if (x > rat(1)) return rat(1);
    return x;
}

}  // namespace qhm
