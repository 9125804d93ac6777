#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treeprob {

// All exact probabilities in this library are arbitrary-precision rationals.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational rat(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Accepts "p/q", plain integers, and terminating decimals ("0.25" -> 1/4).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Integer num(text.substr(0, slash), 10);
        Integer den(text.substr(slash + 1), 10);
        return rat(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        // Base pinned to 10: GMP would read a leading zero as octal.
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        size_t frac_len = text.size() - dot - 1;
        Integer num(digits, 10);
        Integer den(1);
        for (size_t i = 0; i < frac_len; ++i) den *= 10;
        return rat(num, den);
    }
    return Rational(Integer(text, 10));
}

// Canonical "p/q" form, including "1/1" for integers.
inline std::string format_rational(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer factorial(unsigned n) {
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

// (2k-1)!! = (2k-1)(2k-3)...3*1
inline Integer double_factorial(unsigned n) {
    Integer f;
    mpz_2fac_ui(f.get_mpz_t(), n);
    return f;
}

inline Integer binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    Integer b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return b;
}

inline Rational pow_rational(const Rational& base, long exp) {
    if (exp == 0) return 1;
    Rational out;
    if (exp > 0) {
        mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(exp));
        mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(exp));
    } else {
        if (base == 0) throw std::domain_error("0 to a negative power");
        mpz_pow_ui(out.get_num_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(-exp));
        mpz_pow_ui(out.get_den_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(-exp));
    }
    out.canonicalize();
    return out;
}

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace treeprob
