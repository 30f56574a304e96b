#include "symsq/ball.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "symsq/error.hpp"
#include "symsq/exact.hpp"

namespace symsq {

namespace {

thread_local mpfr_prec_t g_default_prec = 128;

mpfr_prec_t resolve(mpfr_prec_t prec) { return prec > 0 ? prec : g_default_prec; }

// Small RAII scalar for bound computations.
struct Tmp {
    mpfr_t v;
    explicit Tmp(mpfr_prec_t prec = BallReal::kRadiusPrec) { mpfr_init2(v, prec); mpfr_set_zero(v, 1); }
    ~Tmp() { mpfr_clear(v); }
    Tmp(const Tmp&) = delete;
    Tmp& operator=(const Tmp&) = delete;
    operator mpfr_ptr() { return v; }
    mpfr_ptr operator->() { return v; }
};

// rad += ulp(mid) when the midpoint operation was inexact.
void add_ulp(mpfr_ptr rad, mpfr_srcptr mid, int inexact) {
    if (inexact == 0) return;
    if (!mpfr_regular_p(mid)) {
        if (mpfr_zero_p(mid)) return;
        fail(ErrorKind::Domain, "non-finite ball midpoint");
    }
    Tmp u;
    mpfr_set_ui_2exp(u, 1, mpfr_get_exp(mid) - mpfr_get_prec(mid), MPFR_RNDU);
    mpfr_add(rad, rad, u, MPFR_RNDU);
}

// Upper bound of |mid| at radius precision.
void abs_up(mpfr_ptr out, mpfr_srcptr mid) { mpfr_abs(out, mid, MPFR_RNDU); }
void abs_down(mpfr_ptr out, mpfr_srcptr mid) { mpfr_abs(out, mid, MPFR_RNDD); }

// Lower bound of |x| over the ball, clamped at 0.
void mag_lower(mpfr_ptr out, const BallReal& x) {
    abs_down(out, x.mid());
    mpfr_sub(out, out, x.rad(), MPFR_RNDD);
    if (mpfr_sgn(out) < 0) mpfr_set_zero(out, 1);
}

void mag_upper(mpfr_ptr out, const BallReal& x) {
    abs_up(out, x.mid());
    mpfr_add(out, out, x.rad(), MPFR_RNDU);
}

}  // namespace

mpfr_prec_t default_precision() { return g_default_prec; }
void set_default_precision(mpfr_prec_t bits) {
    if (bits < MPFR_PREC_MIN || bits > 1 << 20) fail(ErrorKind::Domain, "precision out of range");
    g_default_prec = bits;
}

PrecisionGuard::PrecisionGuard(mpfr_prec_t bits) : saved_(g_default_prec) { set_default_precision(bits); }
PrecisionGuard::~PrecisionGuard() { g_default_prec = saved_; }

mpfr_prec_t bits_for_digits(long digits) {
    return static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(digits) * 3.3219280948873623)) + 16;
}

// ---------------------------------------------------------------- BallReal

BallReal::BallReal(long value, mpfr_prec_t prec) {
    mpfr_init2(mid_, resolve(prec));
    mpfr_init2(rad_, kRadiusPrec);
    mpfr_set_zero(rad_, 1);
    add_ulp(rad_, mid_, mpfr_set_si(mid_, value, MPFR_RNDN));
}

BallReal::BallReal(const mpz_class& value, mpfr_prec_t prec) {
    mpfr_init2(mid_, resolve(prec));
    mpfr_init2(rad_, kRadiusPrec);
    mpfr_set_zero(rad_, 1);
    add_ulp(rad_, mid_, mpfr_set_z(mid_, value.get_mpz_t(), MPFR_RNDN));
}

BallReal::BallReal(const mpq_class& value, mpfr_prec_t prec) {
    mpfr_init2(mid_, resolve(prec));
    mpfr_init2(rad_, kRadiusPrec);
    mpfr_set_zero(rad_, 1);
    add_ulp(rad_, mid_, mpfr_set_q(mid_, value.get_mpq_t(), MPFR_RNDN));
}

BallReal BallReal::from_string(const std::string& text, mpfr_prec_t prec) {
    BallReal out(0L, prec);
    int inexact = mpfr_strtofr(out.mid_, text.c_str(), nullptr, 10, MPFR_RNDN);
    if (!mpfr_number_p(out.mid_)) fail(ErrorKind::Parse, "not a number: " + text);
    add_ulp(out.rad_, out.mid_, inexact);
    return out;
}

BallReal BallReal::from_mid_rad(double mid, double rad, mpfr_prec_t prec) {
    BallReal out(0L, prec);
    mpfr_set_d(out.mid_, mid, MPFR_RNDN);
    mpfr_set_d(out.rad_, std::fabs(rad), MPFR_RNDU);
    return out;
}

BallReal BallReal::pi(mpfr_prec_t prec) {
    BallReal out(0L, prec);
    add_ulp(out.rad_, out.mid_, mpfr_const_pi(out.mid_, MPFR_RNDN));
    return out;
}

BallReal BallReal::log2(mpfr_prec_t prec) {
    BallReal out(0L, prec);
    add_ulp(out.rad_, out.mid_, mpfr_const_log2(out.mid_, MPFR_RNDN));
    return out;
}

BallReal::BallReal(const BallReal& other) {
    mpfr_init2(mid_, other.prec());
    mpfr_init2(rad_, kRadiusPrec);
    mpfr_set(mid_, other.mid_, MPFR_RNDN);
    mpfr_set(rad_, other.rad_, MPFR_RNDU);
}

BallReal::BallReal(BallReal&& other) noexcept {
    mpfr_init2(mid_, MPFR_PREC_MIN);
    mpfr_init2(rad_, kRadiusPrec);
    mpfr_swap(mid_, other.mid_);
    mpfr_swap(rad_, other.rad_);
}

BallReal& BallReal::operator=(const BallReal& other) {
    if (this == &other) return *this;
    mpfr_set_prec(mid_, other.prec());
    mpfr_set(mid_, other.mid_, MPFR_RNDN);
    mpfr_set(rad_, other.rad_, MPFR_RNDU);
    return *this;
}

BallReal& BallReal::operator=(BallReal&& other) noexcept {
    mpfr_swap(mid_, other.mid_);
    mpfr_swap(rad_, other.rad_);
    return *this;
}

BallReal::~BallReal() {
    mpfr_clear(mid_);
    mpfr_clear(rad_);
}

bool BallReal::is_finite() const { return mpfr_number_p(mid_) && mpfr_number_p(rad_); }

bool BallReal::contains_zero() const {
    Tmp m;
    abs_down(m, mid_);
    return mpfr_cmp(m, rad_) <= 0;
}

bool BallReal::is_positive() const { return mpfr_sgn(mid_) > 0 && !contains_zero(); }
bool BallReal::is_negative() const { return mpfr_sgn(mid_) < 0 && !contains_zero(); }

namespace {
// Upper bound of |a - b| for two midpoints.
void diff_up(mpfr_ptr out, mpfr_srcptr a, mpfr_srcptr b) {
    if (mpfr_cmp(a, b) >= 0) {
        mpfr_sub(out, a, b, MPFR_RNDU);
    } else {
        mpfr_sub(out, b, a, MPFR_RNDU);
    }
}
}  // namespace

bool BallReal::contains(const BallReal& other) const {
    Tmp d;
    diff_up(d, mid_, other.mid_);
    mpfr_add(d, d, other.rad_, MPFR_RNDU);
    return mpfr_cmp(d, rad_) <= 0;
}

bool BallReal::contains(const mpq_class& value) const {
    Tmp d;
    if (mpfr_cmp_q(mid_, value.get_mpq_t()) >= 0) {
        mpfr_sub_q(d, mid_, value.get_mpq_t(), MPFR_RNDU);
    } else {
        mpfr_sub_q(d, mid_, value.get_mpq_t(), MPFR_RNDD);
        mpfr_neg(d, d, MPFR_RNDU);
    }
    return mpfr_cmp(d, rad_) <= 0;
}

bool BallReal::overlaps(const BallReal& other) const {
    Tmp d, r;
    if (mpfr_cmp(mid_, other.mid_) >= 0) {
        mpfr_sub(d, mid_, other.mid_, MPFR_RNDD);
    } else {
        mpfr_sub(d, other.mid_, mid_, MPFR_RNDD);
    }
    mpfr_add(r, rad_, other.rad_, MPFR_RNDU);
    return mpfr_cmp(d, r) <= 0;
}

BallReal BallReal::abs_upper() const {
    BallReal out(0L, kRadiusPrec);
    mag_upper(out.mid_, *this);
    return out;
}

BallReal BallReal::abs_lower() const {
    BallReal out(0L, kRadiusPrec);
    mag_lower(out.mid_, *this);
    return out;
}

BallReal& BallReal::add_error(const BallReal& err) {
    Tmp e;
    mag_upper(e, err);
    mpfr_add(rad_, rad_, e, MPFR_RNDU);
    return *this;
}

BallReal& BallReal::add_error(double err) {
    Tmp e;
    mpfr_set_d(e, std::fabs(err), MPFR_RNDU);
    mpfr_add(rad_, rad_, e, MPFR_RNDU);
    return *this;
}

BallReal BallReal::with_prec(mpfr_prec_t p) const {
    BallReal out(*this);
    add_ulp(out.rad_, out.mid_, mpfr_prec_round(out.mid_, resolve(p), MPFR_RNDN));
    return out;
}

long BallReal::certified_digits() const {
    if (contains_zero()) return 0;
    if (is_exact()) return static_cast<long>(static_cast<double>(prec()) * 0.30102999566398120);
    Tmp m, q;
    abs_down(m, mid_);
    mpfr_div(q, rad_, m, MPFR_RNDU);
    mpfr_log10(q, q, MPFR_RNDU);
    double v = -mpfr_get_d(q, MPFR_RNDU);
    return v <= 0 ? 0 : static_cast<long>(std::floor(v));
}

std::string BallReal::mid_string(int digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*Re", digits > 0 ? digits - 1 : 0, mid_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
}

std::string BallReal::to_string(int digits) const {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.3Re", rad_);
    std::string r(buf);
    mpfr_free_str(buf);
    return mid_string(digits) + " +/- " + r;
}

BallReal BallReal::operator-() const {
    BallReal out(*this);
    mpfr_neg(out.mid_, out.mid_, MPFR_RNDN);
    return out;
}

namespace {
void widen_to(mpfr_ptr mid, mpfr_prec_t p) {
    if (mpfr_get_prec(mid) < p) mpfr_prec_round(mid, p, MPFR_RNDN);
}
}  // namespace

BallReal& BallReal::operator+=(const BallReal& rhs) {
    widen_to(mid_, rhs.prec());
    mpfr_add(rad_, rad_, rhs.rad_, MPFR_RNDU);
    add_ulp(rad_, mid_, mpfr_add(mid_, mid_, rhs.mid_, MPFR_RNDN));
    return *this;
}

BallReal& BallReal::operator-=(const BallReal& rhs) {
    widen_to(mid_, rhs.prec());
    mpfr_add(rad_, rad_, rhs.rad_, MPFR_RNDU);
    add_ulp(rad_, mid_, mpfr_sub(mid_, mid_, rhs.mid_, MPFR_RNDN));
    return *this;
}

BallReal& BallReal::operator*=(const BallReal& rhs) {
    widen_to(mid_, rhs.prec());
    Tmp am, bm, t, r;
    abs_up(am, mid_);
    abs_up(bm, rhs.mid_);
    mpfr_mul(r, am, rhs.rad_, MPFR_RNDU);
    mpfr_mul(t, bm, rad_, MPFR_RNDU);
    mpfr_add(r, r, t, MPFR_RNDU);
    mpfr_mul(t, rad_, rhs.rad_, MPFR_RNDU);
    mpfr_add(r, r, t, MPFR_RNDU);
    mpfr_set(rad_, r, MPFR_RNDU);
    add_ulp(rad_, mid_, mpfr_mul(mid_, mid_, rhs.mid_, MPFR_RNDN));
    return *this;
}

BallReal& BallReal::operator/=(const BallReal& rhs) {
    widen_to(mid_, rhs.prec());
    Tmp blo, bm, am, num, den, t;
    mag_lower(blo, rhs);
    if (mpfr_zero_p(blo)) fail(ErrorKind::Domain, "division by a ball containing zero");
    abs_down(bm, rhs.mid_);
    abs_up(am, mid_);
    if (mpfr_zero_p(rhs.rad_)) {
        mpfr_div(num, rad_, bm, MPFR_RNDU);
    } else {
        Tmp bmu;
        abs_up(bmu, rhs.mid_);
        mpfr_mul(num, rad_, bmu, MPFR_RNDU);
        mpfr_mul(t, am, rhs.rad_, MPFR_RNDU);
        mpfr_add(num, num, t, MPFR_RNDU);
        mpfr_mul(den, bm, blo, MPFR_RNDD);
        mpfr_div(num, num, den, MPFR_RNDU);
    }
    mpfr_set(rad_, num, MPFR_RNDU);
    add_ulp(rad_, mid_, mpfr_div(mid_, mid_, rhs.mid_, MPFR_RNDN));
    return *this;
}

BallReal BallReal::mul_2exp(long e) const {
    BallReal out(*this);
    mpfr_mul_2si(out.mid_, out.mid_, e, MPFR_RNDN);
    mpfr_mul_2si(out.rad_, out.rad_, e, MPFR_RNDU);
    return out;
}

// ------------------------------------------------------ real functions

BallReal sqr(const BallReal& x) {
    if (!x.contains_zero()) return x * x;
    // [0, max^2]
    BallReal out(0L, x.prec());
    Tmp hi;
    mag_upper(hi, x);
    mpfr_sqr(hi, hi, MPFR_RNDU);
    mpfr_div_2ui(hi, hi, 1, MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), mpfr_set(out.mid_mut(), hi, MPFR_RNDN));
    mpfr_add(out.rad_mut(), out.rad_mut(), hi, MPFR_RNDU);
    return out;
}

BallReal sqrt(const BallReal& x) {
    BallReal out(0L, x.prec());
    Tmp lo;
    mpfr_sub(lo, x.mid(), x.rad(), MPFR_RNDD);
    if (mpfr_sgn(lo) < 0) fail(ErrorKind::Domain, "sqrt of a ball with negative part");
    int inexact = mpfr_sqrt(out.mid_mut(), x.mid(), MPFR_RNDN);
    if (!x.is_exact()) {
        Tmp r;
        if (mpfr_zero_p(lo)) {
            mpfr_add(r, x.mid(), x.rad(), MPFR_RNDU);
            mpfr_sqrt(r, r, MPFR_RNDU);
        } else {
            Tmp s;
            mpfr_sqrt(s, lo, MPFR_RNDD);
            mpfr_div(r, x.rad(), s, MPFR_RNDU);
        }
        mpfr_set(out.rad_mut(), r, MPFR_RNDU);
    }
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal exp(const BallReal& x) {
    BallReal out(0L, x.prec());
    int inexact = mpfr_exp(out.mid_mut(), x.mid(), MPFR_RNDN);
    if (!x.is_exact()) {
        Tmp e, m;
        mpfr_exp(e, x.mid(), MPFR_RNDU);
        mpfr_expm1(m, x.rad(), MPFR_RNDU);
        mpfr_mul(e, e, m, MPFR_RNDU);
        mpfr_set(out.rad_mut(), e, MPFR_RNDU);
    }
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal log(const BallReal& x) {
    Tmp lo;
    mpfr_sub(lo, x.mid(), x.rad(), MPFR_RNDD);
    if (mpfr_sgn(lo) <= 0) fail(ErrorKind::Domain, "log of a ball not contained in (0, inf)");
    BallReal out(0L, x.prec());
    int inexact = mpfr_log(out.mid_mut(), x.mid(), MPFR_RNDN);
    if (!x.is_exact()) mpfr_div(out.rad_mut(), x.rad(), lo, MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal sin(const BallReal& x) {
    BallReal out(0L, x.prec());
    int inexact = mpfr_sin(out.mid_mut(), x.mid(), MPFR_RNDN);
    mpfr_set(out.rad_mut(), x.rad(), MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal cos(const BallReal& x) {
    BallReal out(0L, x.prec());
    int inexact = mpfr_cos(out.mid_mut(), x.mid(), MPFR_RNDN);
    mpfr_set(out.rad_mut(), x.rad(), MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal atan2(const BallReal& y, const BallReal& x) {
    Tmp xlo, ylo, z2, t;
    mag_lower(xlo, x);
    mag_lower(ylo, y);
    mpfr_sqr(z2, xlo, MPFR_RNDD);
    mpfr_sqr(t, ylo, MPFR_RNDD);
    mpfr_add(z2, z2, t, MPFR_RNDD);
    if (mpfr_zero_p(z2)) fail(ErrorKind::Domain, "argument of a ball containing zero");
    Tmp xneg;
    mpfr_sub(xneg, x.mid(), x.rad(), MPFR_RNDD);
    if (mpfr_sgn(xneg) < 0 && y.contains_zero() && !(y.is_exact() && mpfr_zero_p(y.mid()) && x.is_negative()))
        fail(ErrorKind::Domain, "ball meets the branch cut of arg");
    mpfr_prec_t p = std::max(x.prec(), y.prec());
    BallReal out(0L, p);
    int inexact = mpfr_atan2(out.mid_mut(), y.mid(), x.mid(), MPFR_RNDN);
    Tmp xu, yu, r;
    mag_upper(xu, x);
    mag_upper(yu, y);
    mpfr_mul(r, x.rad(), yu, MPFR_RNDU);
    mpfr_mul(t, y.rad(), xu, MPFR_RNDU);
    mpfr_add(r, r, t, MPFR_RNDU);
    mpfr_div(r, r, z2, MPFR_RNDU);
    mpfr_set(out.rad_mut(), r, MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), inexact);
    return out;
}

BallReal abs(const BallReal& x) {
    if (!x.contains_zero()) {
        BallReal out(x);
        mpfr_abs(out.mid_mut(), out.mid(), MPFR_RNDN);
        return out;
    }
    BallReal out(0L, x.prec());
    Tmp hi;
    mag_upper(hi, x);
    mpfr_div_2ui(hi, hi, 1, MPFR_RNDU);
    add_ulp(out.rad_mut(), out.mid(), mpfr_set(out.mid_mut(), hi, MPFR_RNDN));
    mpfr_add(out.rad_mut(), out.rad_mut(), hi, MPFR_RNDU);
    return out;
}

BallReal pow(const BallReal& x, long n) {
    if (n < 0) return BallReal(1L, x.prec()) / pow(x, -n);
    BallReal result(1L, x.prec());
    BallReal base(x);
    bool first = true;
    while (n > 0) {
        if (n & 1) {
            if (first) {
                result = base;
                first = false;
            } else {
                result *= base;
            }
        }
        n >>= 1;
        if (n > 0) base = sqr(base);
    }
    return result;
}

BallReal pow(const BallReal& x, const BallReal& s) { return exp(s * log(x)); }

BallReal hull(const BallReal& a, const BallReal& b) {
    mpfr_prec_t p = std::max(a.prec(), b.prec());
    Tmp lo(p + 64), hi(p + 64), t(p + 64);
    mpfr_sub(lo, a.mid(), a.rad(), MPFR_RNDD);
    mpfr_sub(t, b.mid(), b.rad(), MPFR_RNDD);
    mpfr_min(lo, lo, t, MPFR_RNDD);
    mpfr_add(hi, a.mid(), a.rad(), MPFR_RNDU);
    mpfr_add(t, b.mid(), b.rad(), MPFR_RNDU);
    mpfr_max(hi, hi, t, MPFR_RNDU);
    BallReal out(0L, p);
    mpfr_add(t, lo, hi, MPFR_RNDN);
    mpfr_div_2ui(t, t, 1, MPFR_RNDN);
    mpfr_set(out.mid_mut(), t, MPFR_RNDN);
    Tmp r1, r2;
    mpfr_sub(r1, hi, out.mid(), MPFR_RNDU);
    mpfr_sub(r2, out.mid(), lo, MPFR_RNDU);
    mpfr_max(out.rad_mut(), r1, r2, MPFR_RNDU);
    return out;
}

// ---------------------------------------------------------- BallComplex

BallReal BallComplex::radius() const {
    BallReal out(0L, BallReal::kRadiusPrec);
    Tmp a, b;
    mpfr_sqr(a, re_.rad(), MPFR_RNDU);
    mpfr_sqr(b, im_.rad(), MPFR_RNDU);
    mpfr_add(a, a, b, MPFR_RNDU);
    mpfr_sqrt(out.mid_mut(), a, MPFR_RNDU);
    return out;
}

long BallComplex::certified_digits() const {
    if (contains_zero()) return 0;
    Tmp r, m, t;
    mpfr_set(r, radius().mid(), MPFR_RNDU);
    if (mpfr_zero_p(r)) return static_cast<long>(static_cast<double>(prec()) * 0.30102999566398120);
    mpfr_hypot(m, re_.mid(), im_.mid(), MPFR_RNDD);
    mpfr_div(t, r, m, MPFR_RNDU);
    mpfr_log10(t, t, MPFR_RNDU);
    double v = -mpfr_get_d(t, MPFR_RNDU);
    return v <= 0 ? 0 : static_cast<long>(std::floor(v));
}

std::string BallComplex::to_string(int digits) const {
    return "(" + re_.to_string(digits) + ") + i*(" + im_.to_string(digits) + ")";
}

BallComplex& BallComplex::operator+=(const BallComplex& rhs) {
    re_ += rhs.re_;
    im_ += rhs.im_;
    return *this;
}

BallComplex& BallComplex::operator-=(const BallComplex& rhs) {
    re_ -= rhs.re_;
    im_ -= rhs.im_;
    return *this;
}

BallComplex& BallComplex::operator*=(const BallComplex& rhs) {
    BallReal re = re_ * rhs.re_ - im_ * rhs.im_;
    BallReal im = re_ * rhs.im_ + im_ * rhs.re_;
    re_ = std::move(re);
    im_ = std::move(im);
    return *this;
}

BallComplex& BallComplex::operator*=(const BallReal& rhs) {
    re_ *= rhs;
    im_ *= rhs;
    return *this;
}

BallComplex& BallComplex::operator/=(const BallComplex& rhs) {
    if (rhs.is_real()) {
        re_ /= rhs.re_;
        im_ /= rhs.re_;
        return *this;
    }
    BallReal den = norm(rhs);
    *this *= rhs.conj();
    re_ /= den;
    im_ /= den;
    return *this;
}

BallComplex& BallComplex::add_error(const BallReal& err) {
    re_.add_error(err);
    im_.add_error(err);
    return *this;
}

BallReal norm(const BallComplex& z) { return sqr(z.re()) + sqr(z.im()); }
BallReal abs(const BallComplex& z) {
    if (z.is_real()) return abs(z.re());
    BallReal n = norm(z);
    if (!n.contains_zero()) return sqrt(n);
    // [0, sqrt(upper)]
    BallReal out(0L, n.prec());
    mpfr_add(out.rad_mut(), n.mid(), n.rad(), MPFR_RNDU);
    mpfr_sqrt(out.rad_mut(), out.rad_mut(), MPFR_RNDU);
    return out;
}
BallReal arg(const BallComplex& z) { return atan2(z.im(), z.re()); }

BallComplex exp(const BallComplex& z) {
    BallReal m = exp(z.re());
    if (z.is_real()) return BallComplex(m, BallReal(0L, m.prec()));
    return BallComplex(m * cos(z.im()), m * sin(z.im()));
}

BallComplex log(const BallComplex& z) {
    if (z.is_real()) {
        if (z.re().is_positive()) return BallComplex(log(z.re()), BallReal(0L, z.prec()));
        if (z.re().is_negative()) return BallComplex(log(-z.re()), BallReal::pi(z.prec()));
    }
    BallReal re = log(norm(z)).mul_2exp(-1);
    return BallComplex(re, arg(z));
}

BallComplex pow(const BallComplex& z, long n) {
    if (n < 0) return BallComplex(1L, z.prec()) / pow(z, -n);
    BallComplex result(1L, z.prec());
    BallComplex base(z);
    while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n > 0) base *= base;
    }
    return result;
}

BallComplex pow(const BallReal& base, const BallComplex& s) { return exp(s * log(base)); }

BallComplex expi(const BallReal& theta) { return BallComplex(cos(theta), sin(theta)); }

BallComplex hull(const BallComplex& a, const BallComplex& b) {
    return BallComplex(hull(a.re(), b.re()), hull(a.im(), b.im()));
}

// ---------------------------------------------------------------- Gamma

BallReal factorial(unsigned long n, mpfr_prec_t prec) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return BallReal(f, prec);
}

namespace {

void check_pole(const BallComplex& s) {
    if (!s.im().contains_zero()) return;
    mpfr_prec_t p = s.prec() + 64;
    Tmp lo(p), hi(p);
    mpfr_sub(lo, s.re().mid(), s.re().rad(), MPFR_RNDD);
    if (mpfr_sgn(lo) > 0) return;
    mpfr_add(hi, s.re().mid(), s.re().rad(), MPFR_RNDU);
    if (mpfr_sgn(hi) > 0) mpfr_set_zero(hi, 1);
    mpfr_floor(hi, hi);
    if (mpfr_cmp(hi, lo) >= 0) fail(ErrorKind::Pole, "gamma evaluated at a ball containing a non-positive integer");
}

BallComplex sin_complex(const BallComplex& z) {
    if (z.is_real()) return BallComplex(sin(z.re()), BallReal(0L, z.prec()));
    BallReal ep = exp(z.im());
    BallReal em = BallReal(1L, z.prec()) / ep;
    BallReal ch = (ep + em).mul_2exp(-1);
    BallReal sh = (ep - em).mul_2exp(-1);
    return BallComplex(sin(z.re()) * ch, cos(z.re()) * sh);
}

BallComplex with_prec(const BallComplex& z, mpfr_prec_t p) {
    return BallComplex(z.re().with_prec(p), z.im().with_prec(p));
}

// Stirling series for log Gamma(w); requires Re(w) >= m_terms > 0.
BallComplex stirling_core(const BallComplex& w, long m_terms) {
    mpfr_prec_t p = w.prec();
    BallComplex logw = log(w);
    BallReal half(mpq_class(1, 2), p);
    BallReal two_pi = BallReal::pi(p).mul_2exp(1);
    BallComplex result = (w - BallComplex(half)) * logw - w + BallComplex(log(two_pi).mul_2exp(-1));
    BallComplex winv = BallComplex(1L, p) / w;
    BallComplex winv2 = winv * winv;
    BallComplex power = winv;
    for (long j = 1; j < m_terms; ++j) {
        mpq_class c = bernoulli_number(static_cast<unsigned>(2 * j)) / mpq_class(2 * j * (2 * j - 1));
        result += power * BallReal(c, p);
        power *= winv2;
    }
    // |R_M| <= |B_2M| / (2M(2M-1) |w|^{2M-1}) * sec(arg(w)/2)^{2M+2}
    BallReal wabs = abs(w).abs_lower();
    BallReal cosarg = (w.re().abs_lower() / abs(w).abs_upper());
    BallReal cos_half = sqrt((BallReal(1L, 64) + cosarg).mul_2exp(-1));
    mpq_class bm = bernoulli_number(static_cast<unsigned>(2 * m_terms));
    if (bm < 0) bm = -bm;
    BallReal bound = BallReal(bm / mpq_class(2 * m_terms * (2 * m_terms - 1)), 64) /
                     pow(wabs, 2 * m_terms - 1) / pow(cos_half, 2 * m_terms + 2);
    result.add_error(bound.abs_upper());
    return result;
}

struct ShiftPlan {
    long terms;
    long shift;
};

ShiftPlan plan_stirling(const BallComplex& s) {
    long m = static_cast<long>(s.prec() / 6) + 4;
    double re = mpfr_get_d(s.re().mid(), MPFR_RNDN);
    long shift = 0;
    if (re < static_cast<double>(m)) shift = static_cast<long>(std::ceil(static_cast<double>(m) - re));
    return {m, shift};
}

}  // namespace

BallComplex lgamma_stirling(const BallComplex& s) {
    Tmp lo;
    mpfr_sub(lo, s.re().mid(), s.re().rad(), MPFR_RNDD);
    if (mpfr_sgn(lo) <= 0) fail(ErrorKind::Domain, "log-gamma requires Re(s) > 0");
    mpfr_prec_t out_prec = s.prec();
    BallComplex z = with_prec(s, out_prec + 32);
    ShiftPlan plan = plan_stirling(z);
    BallComplex w = z + BallComplex(plan.shift, z.prec());
    BallComplex result = stirling_core(w, plan.terms);
    for (long j = 0; j < plan.shift; ++j) result -= log(z + BallComplex(j, z.prec()));
    return with_prec(result, out_prec);
}

BallComplex gamma(const BallComplex& s) {
    check_pole(s);
    mpfr_prec_t out_prec = s.prec();
    if (s.is_real() && s.re().is_exact() && mpfr_integer_p(s.re().mid()) && mpfr_sgn(s.re().mid()) > 0 &&
        mpfr_cmp_ui(s.re().mid(), 100000) <= 0) {
        unsigned long n = mpfr_get_ui(s.re().mid(), MPFR_RNDN);
        return BallComplex(factorial(n - 1, out_prec), BallReal(0L, out_prec));
    }
    BallComplex z = with_prec(s, out_prec + 32);
    if (mpfr_cmp_d(z.re().mid(), 0.5) < 0) {
        // Gamma(s) = pi / (sin(pi s) Gamma(1 - s))
        BallReal pi = BallReal::pi(z.prec());
        BallComplex one_minus = BallComplex(1L, z.prec()) - z;
        BallComplex denom = sin_complex(z * pi) * gamma(one_minus);
        return with_prec(BallComplex(pi, BallReal(0L, z.prec())) / denom, out_prec);
    }
    ShiftPlan plan = plan_stirling(z);
    BallComplex w = z + BallComplex(plan.shift, z.prec());
    BallComplex value = exp(stirling_core(w, plan.terms));
    if (plan.shift > 0) {
        BallComplex rising = z;
        for (long j = 1; j < plan.shift; ++j) rising *= z + BallComplex(j, z.prec());
        value /= rising;
    }
    return with_prec(value, out_prec);
}

BallReal gamma(const BallReal& s) { return gamma(BallComplex(s, BallReal(0L, s.prec()))).re(); }

// ---------------------------------------------------------- quadrature

namespace {

struct Node {
    BallReal x_left;
    BallReal x_right;
    BallReal weight;  // already multiplied by the half-width
};

// tanh-sinh node at t >= 0 for the interval [a, b].
Node tanh_sinh_node(const BallReal& t, const BallReal& a, const BallReal& b, const BallReal& hw) {
    mpfr_prec_t p = hw.prec();
    BallReal pi_half = BallReal::pi(p).mul_2exp(-1);
    BallReal et = exp(t);
    BallReal eti = BallReal(1L, p) / et;
    BallReal sh = (et - eti).mul_2exp(-1);
    BallReal ch = (et + eti).mul_2exp(-1);
    BallReal u = pi_half * sh;
    BallReal e2u = exp(u.mul_2exp(1));
    BallReal denom = e2u + BallReal(1L, p);
    // distance to the endpoint, as a fraction of the half-width: 1 - tanh(u)
    BallReal comp = BallReal(2L, p) / denom;
    BallReal w = hw * pi_half * ch * e2u.mul_2exp(2) / sqr(denom);
    return {a + hw * comp, b - hw * comp, w};
}

}  // namespace

BallReal integrate_tanh_sinh(const std::function<BallReal(const BallReal&)>& f, const BallReal& a,
                             const BallReal& b, const BallReal& tol, long* evaluations) {
    mpfr_prec_t p = std::max({a.prec(), b.prec(), default_precision()});
    BallReal hw = (b - a).mul_2exp(-1);
    BallReal c = (a + b).mul_2exp(-1);
    double umax = (static_cast<double>(p) + 20.0) * 0.6931471805599453 / 2.0;
    double tmax = std::asinh(2.0 * umax / 3.141592653589793);
    const int max_level = 12;
    double tol_d = tol.mid_d();
    long evals = 0;

    auto eval_node = [&](const BallReal& t) {
        Node n = tanh_sinh_node(t, a, b, hw);
        evals += 2;
        return n.weight * (f(n.x_left) + f(n.x_right));
    };

    // level 0: step h = 1
    BallReal pi_half = BallReal::pi(p).mul_2exp(-1);
    BallReal sum = hw * pi_half * f(c);
    evals += 1;
    for (long k = 1; static_cast<double>(k) <= tmax; ++k) sum += eval_node(BallReal(k, p));
    BallReal prev = sum;
    for (int level = 1; level <= max_level; ++level) {
        long denom = 1L << level;
        for (long k = 1; static_cast<double>(k) <= tmax * static_cast<double>(denom); k += 2) {
            sum += eval_node(BallReal(mpq_class(k, denom), p));
        }
        BallReal estimate = sum.mul_2exp(-level);
        BallReal diff = estimate - prev;
        double err = std::fabs(diff.mid_d());
        if (level >= 3 && err <= tol_d / 2) {
            if (estimate.rad_d() > tol_d)
                fail(ErrorKind::NonConvergence, "integrand radii exceed tolerance; raise precision");
            estimate.add_error(diff.abs_upper());
            if (evaluations) *evaluations += evals;
            return estimate;
        }
        prev = std::move(estimate);
    }
    fail(ErrorKind::NonConvergence, "tanh-sinh did not reach tolerance within the level budget");
}

BallReal integrate_2d(const Integrand2d& f, const FundamentalRegion& region, const BallReal& tol,
                      const BallReal& tail_bound, QuadratureStats* stats) {
    if (region.y_cut < 1.0) fail(ErrorKind::Domain, "y_cut must be at least 1");
    if (region.x_lo < -0.5 || region.x_hi > 0.5 || region.x_lo >= region.x_hi)
        fail(ErrorKind::Domain, "x-range must lie inside [-1/2, 1/2]");
    mpfr_prec_t p = default_precision();
    BallReal x_lo = BallReal::from_mid_rad(region.x_lo, 0, p);
    BallReal x_hi = BallReal::from_mid_rad(region.x_hi, 0, p);
    BallReal y_cut = BallReal::from_mid_rad(region.y_cut, 0, p);
    BallReal width = x_hi - x_lo;
    BallReal inner_tol = tol / width.mul_2exp(2);
    BallReal outer_tol = tol.mul_2exp(-1);
    long evals = 0;
    auto inner = [&](const BallReal& x) {
        BallReal y0 = sqrt(BallReal(1L, p) - sqr(x));
        return integrate_tanh_sinh([&](const BallReal& y) { return f(x, y); }, y0, y_cut, inner_tol, &evals);
    };
    BallReal result = integrate_tanh_sinh(inner, x_lo, x_hi, outer_tol);
    result.add_error(tail_bound.abs_upper());
    if (stats) stats->evaluations = evals;
    return result;
}

}  // namespace symsq
