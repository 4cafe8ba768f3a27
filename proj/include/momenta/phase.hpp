#pragma once

#include <cassert>
#include <complex>
#include <numbers>
#include <string>

namespace momenta {

/// Exact root-of-unity phase exp(i*pi*e/d), stored as the integer exponent
/// e mod 2d.  The 2d-th roots cover the commutation phases zeta_ij (even
/// exponents) as well as the half-integer phases of displacement operators.
class Phase {
public:
    Phase() : d_(1), exp_(0) {}
    Phase(int d, long long exponent) : d_(d) {
        assert(d >= 1);
        long long m = 2LL * d;
        exp_ = static_cast<int>(((exponent % m) + m) % m);
    }

    static Phase one(int d) { return Phase(d, 0); }
    static Phase minus_one(int d) { return Phase(d, d); }
    /// zeta^e with zeta = exp(2*pi*i/d), i.e. a plain d-th root of unity.
    static Phase root_of_unity(int d, long long e) { return Phase(d, 2 * e); }

    int order() const { return d_; }
    int exponent() const { return exp_; }

    bool is_one() const { return exp_ == 0; }
    bool is_minus_one() const { return exp_ == d_; }

    Phase operator*(const Phase& o) const {
        assert(d_ == o.d_);
        return Phase(d_, static_cast<long long>(exp_) + o.exp_);
    }
    Phase& operator*=(const Phase& o) { return *this = *this * o; }

    Phase conj() const { return Phase(d_, -static_cast<long long>(exp_)); }
    Phase pow(long long k) const { return Phase(d_, static_cast<long long>(exp_) * k); }

    bool operator==(const Phase& o) const { return d_ == o.d_ && exp_ == o.exp_; }
    bool operator!=(const Phase& o) const { return !(*this == o); }

    std::complex<double> value() const {
        double arg = std::numbers::pi * exp_ / d_;
        return {std::cos(arg), std::sin(arg)};
    }

    /// Half-angle direction exp(i*pi*e/(2d)); used when solving conj(v) = phase*v.
    std::complex<double> half_angle_value() const {
        double arg = std::numbers::pi * exp_ / (2.0 * d_);
        return {std::cos(arg), std::sin(arg)};
    }

    std::string str() const {
        if (exp_ == 0) return "+1";
        if (exp_ == d_) return "-1";
        return "w^" + std::to_string(exp_) + "/" + std::to_string(2 * d_);
    }

private:
    int d_;
    int exp_;
};

}  // namespace momenta
