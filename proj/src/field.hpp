#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "errors.hpp"

namespace pmc {

inline bool is_prime(std::int64_t q) {
    if (q < 2) return false;
    for (std::int64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) return false;
    return true;
}

/// Prime field F_q with runtime modulus. Elements live in [0, q).
struct PrimeField {
    using Elem = std::int64_t;

    std::int64_t q;

    explicit PrimeField(std::int64_t q_) : q(q_) {
        if (!is_prime(q_)) throw precondition_error("field modulus " + std::to_string(q_) + " is not prime");
    }

    Elem zero() const { return 0; }
    Elem one() const { return 1 % q; }
    Elem from_int(std::int64_t v) const {
        Elem r = v % q;
        return r < 0 ? r + q : r;
    }
    bool is_zero(Elem a) const { return a == 0; }
    Elem add(Elem a, Elem b) const {
        Elem r = a + b;
        return r >= q ? r - q : r;
    }
    Elem sub(Elem a, Elem b) const {
        Elem r = a - b;
        return r < 0 ? r + q : r;
    }
    Elem neg(Elem a) const { return a == 0 ? 0 : q - a; }
    Elem mul(Elem a, Elem b) const { return (a * b) % q; }
    Elem inv(Elem a) const {
        if (a == 0) throw precondition_error("division by zero in F_q");
        // extended Euclid
        std::int64_t t = 0, nt = 1, r = q, nr = a;
        while (nr != 0) {
            std::int64_t qu = r / nr;
            std::int64_t tmp = t - qu * nt;
            t = nt; nt = tmp;
            tmp = r - qu * nr;
            r = nr; nr = tmp;
        }
        return from_int(t);
    }
    std::string to_string(Elem a) const { return std::to_string(a); }
    static constexpr bool is_prime_field = true;
};

/// Exact rationals behind the same interface.
struct RationalField {
    using Elem = boost::multiprecision::cpp_rational;

    Elem zero() const { return Elem(0); }
    Elem one() const { return Elem(1); }
    Elem from_int(std::int64_t v) const { return Elem(v); }
    bool is_zero(const Elem& a) const { return a == 0; }
    Elem add(const Elem& a, const Elem& b) const { return a + b; }
    Elem sub(const Elem& a, const Elem& b) const { return a - b; }
    Elem neg(const Elem& a) const { return -a; }
    Elem mul(const Elem& a, const Elem& b) const { return a * b; }
    Elem inv(const Elem& a) const {
        if (a == 0) throw precondition_error("division by zero in Q");
        return 1 / a;
    }
    std::string to_string(const Elem& a) const { return a.str(); }
    static constexpr bool is_prime_field = false;
};

}  // namespace pmc
