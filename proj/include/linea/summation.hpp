#pragma once

#include <cmath>
#include <complex>

namespace linea {

using cplx = std::complex<double>;

/// Neumaier-compensated accumulator. The series computed in this library run
/// to 1e4..1e6 terms; the compensation keeps the summation error at the level
/// of a single rounding regardless of term count.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    KahanSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Componentwise compensated complex accumulator.
class KahanSumC {
public:
    void add(const cplx& z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    KahanSumC& operator+=(const cplx& z) {
        add(z);
        return *this;
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

} // namespace linea
