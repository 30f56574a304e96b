#pragma once

// Midpoint-radius real and complex balls on top of MPFR.
//
// Every operation returns a ball that contains the exact image of all
// points of its input balls. Midpoints carry the working precision; radii
// are kept at a fixed low precision and always rounded upward.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <functional>
#include <string>

namespace symsq {

mpfr_prec_t default_precision();
void set_default_precision(mpfr_prec_t bits);

/// Scoped override of the default working precision.
class PrecisionGuard {
public:
    explicit PrecisionGuard(mpfr_prec_t bits);
    ~PrecisionGuard();
    PrecisionGuard(const PrecisionGuard&) = delete;
    PrecisionGuard& operator=(const PrecisionGuard&) = delete;

private:
    mpfr_prec_t saved_;
};

/// Bits needed for `digits` decimal digits plus a guard margin.
mpfr_prec_t bits_for_digits(long digits);

class BallReal {
public:
    static constexpr mpfr_prec_t kRadiusPrec = 64;

    /// `prec == 0` means the current default precision.
    BallReal(long value = 0, mpfr_prec_t prec = 0);
    BallReal(const mpz_class& value, mpfr_prec_t prec = 0);
    BallReal(const mpq_class& value, mpfr_prec_t prec = 0);
    /// Decimal string; rounding of the midpoint is folded into the radius.
    static BallReal from_string(const std::string& text, mpfr_prec_t prec = 0);
    /// Ball with explicit midpoint and radius given as doubles (exact binary values).
    static BallReal from_mid_rad(double mid, double rad, mpfr_prec_t prec = 0);
    static BallReal pi(mpfr_prec_t prec = 0);
    static BallReal log2(mpfr_prec_t prec = 0);

    BallReal(const BallReal& other);
    BallReal(BallReal&& other) noexcept;
    BallReal& operator=(const BallReal& other);
    BallReal& operator=(BallReal&& other) noexcept;
    ~BallReal();

    mpfr_prec_t prec() const { return mpfr_get_prec(mid_); }
    mpfr_srcptr mid() const { return mid_; }
    mpfr_srcptr rad() const { return rad_; }
    mpfr_ptr mid_mut() { return mid_; }
    mpfr_ptr rad_mut() { return rad_; }

    double mid_d() const { return mpfr_get_d(mid_, MPFR_RNDN); }
    double rad_d() const { return mpfr_get_d(rad_, MPFR_RNDU); }

    bool is_exact() const { return mpfr_zero_p(rad_) != 0; }
    bool is_finite() const;
    bool contains_zero() const;
    bool is_positive() const;   // whole ball > 0
    bool is_negative() const;   // whole ball < 0
    bool contains(const BallReal& other) const;
    bool contains(const mpq_class& value) const;
    bool overlaps(const BallReal& other) const;

    /// Upper bound for |x| over the ball, as a radius-precision value.
    BallReal abs_upper() const;
    /// Lower bound for |x| over the ball (0 if the ball contains zero).
    BallReal abs_lower() const;

    /// Inflate radius by |err| (upper bound of err's magnitude).
    BallReal& add_error(const BallReal& err);
    BallReal& add_error(double err);

    BallReal with_prec(mpfr_prec_t prec) const;

    /// Number of decimal digits certified relative to |mid| (0 if none).
    long certified_digits() const;
    /// Midpoint printed with `digits` significant digits plus "+/- rad".
    std::string to_string(int digits = 20) const;
    std::string mid_string(int digits) const;

    BallReal operator-() const;
    BallReal& operator+=(const BallReal& rhs);
    BallReal& operator-=(const BallReal& rhs);
    BallReal& operator*=(const BallReal& rhs);
    BallReal& operator/=(const BallReal& rhs);

    friend BallReal operator+(BallReal a, const BallReal& b) { return a += b; }
    friend BallReal operator-(BallReal a, const BallReal& b) { return a -= b; }
    friend BallReal operator*(BallReal a, const BallReal& b) { return a *= b; }
    friend BallReal operator/(BallReal a, const BallReal& b) { return a /= b; }

    BallReal mul_2exp(long e) const;

private:
    mpfr_t mid_;
    mpfr_t rad_;
};

BallReal sqr(const BallReal& x);
BallReal sqrt(const BallReal& x);
BallReal exp(const BallReal& x);
BallReal log(const BallReal& x);
BallReal sin(const BallReal& x);
BallReal cos(const BallReal& x);
BallReal atan2(const BallReal& y, const BallReal& x);
BallReal abs(const BallReal& x);
BallReal pow(const BallReal& x, long n);
/// x^s for x > 0.
BallReal pow(const BallReal& x, const BallReal& s);
/// Smallest ball containing both inputs.
BallReal hull(const BallReal& a, const BallReal& b);

class BallComplex {
public:
    BallComplex() = default;
    BallComplex(BallReal re) : re_(std::move(re)), im_(0L, re_.prec()) {}
    BallComplex(BallReal re, BallReal im) : re_(std::move(re)), im_(std::move(im)) {}
    BallComplex(long re, mpfr_prec_t prec = 0) : re_(re, prec), im_(0L, prec) {}

    const BallReal& re() const { return re_; }
    const BallReal& im() const { return im_; }
    BallReal& re() { return re_; }
    BallReal& im() { return im_; }
    mpfr_prec_t prec() const { return std::max(re_.prec(), im_.prec()); }

    bool contains(const BallComplex& other) const {
        return re_.contains(other.re_) && im_.contains(other.im_);
    }
    bool overlaps(const BallComplex& other) const {
        return re_.overlaps(other.re_) && im_.overlaps(other.im_);
    }
    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
    bool is_real() const { return im_.is_exact() && mpfr_zero_p(im_.mid()); }

    /// Euclidean radius bound sqrt(rad_re^2 + rad_im^2) (upper).
    BallReal radius() const;
    long certified_digits() const;
    std::string to_string(int digits = 20) const;

    BallComplex conj() const { return BallComplex(re_, -im_); }
    BallComplex operator-() const { return BallComplex(-re_, -im_); }
    BallComplex& operator+=(const BallComplex& rhs);
    BallComplex& operator-=(const BallComplex& rhs);
    BallComplex& operator*=(const BallComplex& rhs);
    BallComplex& operator*=(const BallReal& rhs);
    BallComplex& operator/=(const BallComplex& rhs);

    friend BallComplex operator+(BallComplex a, const BallComplex& b) { return a += b; }
    friend BallComplex operator-(BallComplex a, const BallComplex& b) { return a -= b; }
    friend BallComplex operator*(BallComplex a, const BallComplex& b) { return a *= b; }
    friend BallComplex operator*(BallComplex a, const BallReal& b) { return a *= b; }
    friend BallComplex operator*(const BallReal& b, BallComplex a) { return a *= b; }
    friend BallComplex operator/(BallComplex a, const BallComplex& b) { return a /= b; }
    friend BallComplex operator*(BallComplex a, long b) { return a *= BallReal(b, a.prec()); }
    friend BallComplex operator/(BallComplex a, long b) { return a /= BallComplex(b, a.prec()); }
    friend BallComplex operator/(BallComplex a, const BallReal& b) {
        a.re_ /= b;
        a.im_ /= b;
        return a;
    }

    BallComplex& add_error(const BallReal& err);

private:
    BallReal re_;
    BallReal im_;
};

BallReal abs(const BallComplex& z);
BallReal norm(const BallComplex& z);  // |z|^2
BallReal arg(const BallComplex& z);
BallComplex exp(const BallComplex& z);
/// Principal logarithm; throws Domain if the ball meets the branch cut.
BallComplex log(const BallComplex& z);
BallComplex pow(const BallComplex& z, long n);
/// base^s for a positive real base.
BallComplex pow(const BallReal& base, const BallComplex& s);
/// e^{i theta}.
BallComplex expi(const BallReal& theta);
BallComplex hull(const BallComplex& a, const BallComplex& b);

/// Gamma function. Throws Pole if the ball of s contains a non-positive integer.
BallComplex gamma(const BallComplex& s);
BallReal gamma(const BallReal& s);
/// log Gamma via Stirling with rigorous remainder, valid for Re(s) > 0.
BallComplex lgamma_stirling(const BallComplex& s);
/// n! as an exact ball.
BallReal factorial(unsigned long n, mpfr_prec_t prec = 0);

/// Truncated modular fundamental-domain strip
/// {|x| <= 1/2, x^2 + y^2 >= 1, y <= y_cut}, restricted to x in [x_lo, x_hi].
struct FundamentalRegion {
    double y_cut = 10.0;
    double x_lo = -0.5;
    double x_hi = 0.5;
};

struct QuadratureStats {
    long evaluations = 0;
    int outer_level = 0;
};

using Integrand2d = std::function<BallReal(const BallReal& x, const BallReal& y)>;

/// Doubly-adaptive tanh-sinh integration over a FundamentalRegion. The
/// caller-supplied tail bound (integral over y > y_cut) is added to the
/// radius. Throws NonConvergence if either axis stalls before reaching tol.
BallReal integrate_2d(const Integrand2d& f, const FundamentalRegion& region,
                      const BallReal& tol, const BallReal& tail_bound,
                      QuadratureStats* stats = nullptr);

/// One-dimensional adaptive tanh-sinh on [a, b] (finite endpoints).
BallReal integrate_tanh_sinh(const std::function<BallReal(const BallReal&)>& f,
                             const BallReal& a, const BallReal& b, const BallReal& tol,
                             long* evaluations = nullptr);

}  // namespace symsq
