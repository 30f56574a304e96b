#include "symsq/exact.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include "symsq/error.hpp"

namespace symsq {

// ------------------------------------------------------------- integers

long gcd_long(long a, long b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

long lcm_long(long a, long b) { return a / gcd_long(a, b) * b; }

long mod_pos(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

long euler_phi(long n) {
    if (n < 1) fail(ErrorKind::Domain, "phi of a non-positive integer");
    long result = n;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

namespace {

long moebius(long n) {
    long mu = 1;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            mu = -mu;
        }
    }
    if (n > 1) mu = -mu;
    return mu;
}

std::mutex g_bernoulli_mutex;
std::vector<mpq_class> g_bernoulli;  // index n -> B_n

void extend_bernoulli(unsigned n_max) {
    // Tangent numbers T_1..T_m give B_{2k} = (-1)^{k-1} 2k T_k / (4^k (4^k - 1)).
    unsigned m = std::max(8u, n_max / 2 + 1);
    std::vector<mpz_class> t(m + 1);
    t[1] = 1;
    for (unsigned k = 2; k <= m; ++k) t[k] = (k - 1) * t[k - 1];
    for (unsigned k = 2; k <= m; ++k)
        for (unsigned j = k; j <= m; ++j) t[j] = (j - k) * t[j - 1] + (j - k + 2) * t[j];
    std::vector<mpq_class> b(2 * m + 1, mpq_class(0));
    b[0] = 1;
    b[1] = mpq_class(-1, 2);
    for (unsigned k = 1; k <= m; ++k) {
        mpz_class four_k;
        mpz_ui_pow_ui(four_k.get_mpz_t(), 4, k);
        mpq_class v(2 * k * t[k], four_k * (four_k - 1));
        v.canonicalize();
        b[2 * k] = (k % 2 == 1) ? v : mpq_class(-v);
    }
    g_bernoulli = std::move(b);
}

std::mutex g_cyclo_mutex;
std::map<long, std::vector<mpz_class>> g_cyclo;

std::vector<mpz_class> compute_cyclotomic(long n) {
    // X^n - 1 divided by Phi_d for proper divisors d.
    std::vector<mpz_class> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (long d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        const std::vector<mpz_class>& den = cyclotomic_polynomial(d);
        long dn = static_cast<long>(num.size()) - 1;
        long dd = static_cast<long>(den.size()) - 1;
        std::vector<mpz_class> q(dn - dd + 1, 0);
        for (long i = dn - dd; i >= 0; --i) {
            q[i] = num[i + dd];  // den is monic
            if (q[i] != 0)
                for (long j = 0; j <= dd; ++j) num[i + j] -= q[i] * den[j];
        }
        num = std::move(q);
    }
    return num;
}

// Gaussian elimination over Q; returns a solution of A x = b or nothing.
std::optional<std::vector<mpq_class>> solve_rational(std::vector<std::vector<mpq_class>> a,
                                                     std::vector<mpq_class> b) {
    size_t rows = a.size();
    size_t cols = rows ? a[0].size() : 0;
    std::vector<long> pivot_col;
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(a[piv], a[r]);
        std::swap(b[piv], b[r]);
        mpq_class inv = 1 / a[r][c];
        for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
        b[r] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            mpq_class f = a[i][c];
            for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col.push_back(static_cast<long>(c));
        ++r;
    }
    for (size_t i = r; i < rows; ++i)
        if (b[i] != 0) return std::nullopt;
    std::vector<mpq_class> x(cols, 0);
    for (size_t i = 0; i < r; ++i) x[pivot_col[i]] = b[i];
    return x;
}

std::string rational_string(const mpq_class& q) { return q.get_str(); }

}  // namespace

mpq_class bernoulli_number(unsigned n) {
    std::lock_guard<std::mutex> lock(g_bernoulli_mutex);
    if (n >= g_bernoulli.size()) extend_bernoulli(std::max<unsigned>(n, 2 * static_cast<unsigned>(g_bernoulli.size())));
    return g_bernoulli[n];
}

const std::vector<mpz_class>& cyclotomic_polynomial(long n) {
    if (n < 1) fail(ErrorKind::Domain, "cyclotomic polynomial of non-positive order");
    {
        std::lock_guard<std::mutex> lock(g_cyclo_mutex);
        auto it = g_cyclo.find(n);
        if (it != g_cyclo.end()) return it->second;
    }
    std::vector<mpz_class> poly;
    if (n == 1) {
        poly = {-1, 1};
    } else {
        poly = compute_cyclotomic(n);
    }
    std::lock_guard<std::mutex> lock(g_cyclo_mutex);
    return g_cyclo.emplace(n, std::move(poly)).first->second;
}

// ----------------------------------------------------------- Cyclotomic

Cyclotomic::Cyclotomic(long order) : order_(order) {
    if (order < 1) fail(ErrorKind::Domain, "cyclotomic order must be positive");
    coeffs_.assign(euler_phi(order), mpq_class(0));
}

Cyclotomic::Cyclotomic(long order, const mpq_class& value) : Cyclotomic(order) { coeffs_[0] = value; }

Cyclotomic Cyclotomic::from_coeffs(long order, const std::vector<mpq_class>& coeffs) {
    Cyclotomic out(order);
    out.reduce(coeffs);
    return out;
}

Cyclotomic Cyclotomic::zeta(long order, long k) {
    std::vector<mpq_class> raw(order, mpq_class(0));
    raw[mod_pos(k, order)] = 1;
    return from_coeffs(order, raw);
}

void Cyclotomic::reduce(std::vector<mpq_class> raw) {
    long n = order_;
    std::vector<mpq_class> folded(n, mpq_class(0));
    for (size_t i = 0; i < raw.size(); ++i)
        if (raw[i] != 0) folded[i % n] += raw[i];
    const std::vector<mpz_class>& phi = cyclotomic_polynomial(n);
    long deg = static_cast<long>(phi.size()) - 1;
    for (long i = n - 1; i >= deg; --i) {
        if (folded[i] == 0) continue;
        mpq_class c = folded[i];
        for (long j = 0; j <= deg; ++j) folded[i - deg + j] -= c * phi[j];
    }
    folded.resize(deg);
    coeffs_ = std::move(folded);
}

bool Cyclotomic::is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const mpq_class& c) { return c == 0; });
}

bool Cyclotomic::is_rational() const {
    return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const mpq_class& c) { return c == 0; });
}

mpq_class Cyclotomic::rational_value() const {
    if (!is_rational()) fail(ErrorKind::Domain, "cyclotomic number is not rational: " + to_string());
    return coeffs_[0];
}

Cyclotomic Cyclotomic::lift(long m) const {
    if (m % order_ != 0) fail(ErrorKind::Domain, "cannot lift Q(zeta_" + std::to_string(order_) + ") to order " + std::to_string(m));
    if (m == order_) return *this;
    long step = m / order_;
    std::vector<mpq_class> raw(m, mpq_class(0));
    for (size_t k = 0; k < coeffs_.size(); ++k) raw[k * step] = coeffs_[k];
    return from_coeffs(m, raw);
}

Cyclotomic Cyclotomic::galois(long a) const {
    if (gcd_long(a, order_) != 1) fail(ErrorKind::Domain, "Galois exponent not coprime to the order");
    std::vector<mpq_class> raw(order_, mpq_class(0));
    for (size_t k = 0; k < coeffs_.size(); ++k) raw[mod_pos(static_cast<long>(k) * a, order_)] += coeffs_[k];
    return from_coeffs(order_, raw);
}

Cyclotomic Cyclotomic::inverse() const {
    if (is_zero()) fail(ErrorKind::Domain, "inverse of zero");
    if (is_rational()) return Cyclotomic(order_, 1 / coeffs_[0]);
    size_t d = coeffs_.size();
    // column j holds the coefficients of x * zeta^j
    std::vector<std::vector<mpq_class>> a(d, std::vector<mpq_class>(d));
    for (size_t j = 0; j < d; ++j) {
        Cyclotomic col = *this * zeta(order_, static_cast<long>(j));
        for (size_t i = 0; i < d; ++i) a[i][j] = col.coeffs_[i];
    }
    std::vector<mpq_class> rhs(d, mpq_class(0));
    rhs[0] = 1;
    auto sol = solve_rational(a, rhs);
    if (!sol) fail(ErrorKind::Domain, "cyclotomic inverse failed");
    Cyclotomic out(order_);
    out.coeffs_ = *sol;
    return out;
}

mpq_class Cyclotomic::trace() const {
    mpq_class t = 0;
    long n = order_;
    long phi_n = euler_phi(n);
    for (size_t k = 0; k < coeffs_.size(); ++k) {
        if (coeffs_[k] == 0) continue;
        long g = gcd_long(static_cast<long>(k), n);
        if (k == 0) g = n;
        long m = n / g;
        t += coeffs_[k] * moebius(m) * (phi_n / euler_phi(m));
    }
    return t;
}

mpq_class Cyclotomic::norm() const {
    Cyclotomic prod(order_, 1);
    for (long a = 1; a <= order_; ++a)
        if (gcd_long(a, order_) == 1) prod *= galois(a);
    return prod.rational_value();
}

Cyclotomic Cyclotomic::operator-() const {
    Cyclotomic out(*this);
    for (auto& c : out.coeffs_) c = -c;
    return out;
}

Cyclotomic& Cyclotomic::operator+=(const Cyclotomic& rhs) {
    if (rhs.order_ != order_) {
        long m = lcm_long(order_, rhs.order_);
        *this = lift(m);
        return *this += rhs.lift(m);
    }
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

Cyclotomic& Cyclotomic::operator-=(const Cyclotomic& rhs) { return *this += -rhs; }

Cyclotomic& Cyclotomic::operator*=(const Cyclotomic& rhs) {
    if (rhs.order_ != order_) {
        long m = lcm_long(order_, rhs.order_);
        *this = lift(m);
        return *this *= rhs.lift(m);
    }
    if (rhs.is_rational()) return *this *= rhs.coeffs_[0];
    if (is_rational()) {
        mpq_class c = coeffs_[0];
        *this = rhs;
        return *this *= c;
    }
    size_t d = coeffs_.size();
    std::vector<mpq_class> raw(2 * d, mpq_class(0));
    for (size_t i = 0; i < d; ++i) {
        if (coeffs_[i] == 0) continue;
        for (size_t j = 0; j < d; ++j)
            if (rhs.coeffs_[j] != 0) raw[i + j] += coeffs_[i] * rhs.coeffs_[j];
    }
    reduce(raw);
    return *this;
}

Cyclotomic& Cyclotomic::operator*=(const mpq_class& rhs) {
    for (auto& c : coeffs_) c *= rhs;
    return *this;
}

Cyclotomic Cyclotomic::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Cyclotomic result(order_, 1);
    Cyclotomic base(*this);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return result;
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.order_ == b.order_) return a.coeffs_ == b.coeffs_;
    long m = lcm_long(a.order_, b.order_);
    return a.lift(m).coeffs_ == b.lift(m).coeffs_;
}

std::string Cyclotomic::to_string() const {
    std::ostringstream out;
    bool first = true;
    for (size_t k = 0; k < coeffs_.size(); ++k) {
        const mpq_class& c = coeffs_[k];
        if (c == 0) continue;
        std::string cs = rational_string(c < 0 ? mpq_class(-c) : c);
        if (first) {
            if (c < 0) out << "-";
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (k == 0) {
            out << cs;
            continue;
        }
        if (c != 1 && c != -1) out << cs << "*";
        out << "z" << order_;
        if (k > 1) out << "^" << k;
    }
    if (first) out << "0";
    return out.str();
}

// ------------------------------------------------------ QuadraticNumber

bool is_squarefree(long d) {
    long n = d < 0 ? -d : d;
    if (n == 0) return false;
    for (long p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0) return false;
    }
    return true;
}

long quadratic_discriminant(long d) { return mod_pos(d, 4) == 1 ? d : 4 * d; }

Cyclotomic sqrt_as_cyclotomic(long d) {
    if (d == 1 || !is_squarefree(d)) fail(ErrorKind::Domain, "sqrt of a non-square-free integer");
    long disc = quadratic_discriminant(d);
    long n = disc < 0 ? -disc : disc;
    std::vector<mpq_class> raw(n, mpq_class(0));
    mpz_class dz(disc);
    for (long a = 1; a <= n; ++a) {
        mpz_class az(a);
        raw[a % n] += mpz_kronecker(dz.get_mpz_t(), az.get_mpz_t());
    }
    Cyclotomic g = Cyclotomic::from_coeffs(n, raw);
    if (disc != d) g *= mpq_class(1, 2);
    if (g * g != Cyclotomic(1, d)) fail(ErrorKind::Inconsistency, "quadratic Gauss sum check failed");
    return g;
}

QuadraticNumber::QuadraticNumber(long d, mpq_class a, mpq_class b) : d_(d), a_(std::move(a)), b_(std::move(b)) {
    if (d == 0 || d == 1 || !is_squarefree(d))
        fail(ErrorKind::Domain, "quadratic field parameter must be square-free and not 0 or 1");
}

void QuadraticNumber::check_compatible(const QuadraticNumber& rhs) const {
    if (rhs.d_ != d_) fail(ErrorKind::Domain, "mixing different quadratic fields");
}

QuadraticNumber QuadraticNumber::inverse() const {
    mpq_class n = norm();
    if (n == 0) fail(ErrorKind::Domain, "inverse of zero");
    return QuadraticNumber(d_, a_ / n, -b_ / n);
}

mpz_class QuadraticNumber::denominator() const {
    mpz_class l;
    mpz_lcm(l.get_mpz_t(), a_.get_den_mpz_t(), b_.get_den_mpz_t());
    return l;
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& rhs) {
    check_compatible(rhs);
    a_ += rhs.a_;
    b_ += rhs.b_;
    return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& rhs) {
    check_compatible(rhs);
    a_ -= rhs.a_;
    b_ -= rhs.b_;
    return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& rhs) {
    check_compatible(rhs);
    mpq_class a = a_ * rhs.a_ + d_ * b_ * rhs.b_;
    mpq_class b = a_ * rhs.b_ + b_ * rhs.a_;
    a_ = a;
    b_ = b;
    return *this;
}

Cyclotomic QuadraticNumber::to_cyclotomic() const {
    Cyclotomic s = sqrt_as_cyclotomic(d_);
    return Cyclotomic(s.order(), a_) + s * b_;
}

QuadraticNumber QuadraticNumber::from_cyclotomic(const Cyclotomic& x, long d) {
    Cyclotomic s = sqrt_as_cyclotomic(d);
    long m = lcm_long(s.order(), x.order());
    Cyclotomic xl = x.lift(m);
    Cyclotomic sl = s.lift(m);
    mpq_class deg = euler_phi(m);
    // Tr(x) = deg * a, Tr(x s) = deg * d * b
    mpq_class a = xl.trace() / deg;
    mpq_class b = (xl * sl).trace() / (deg * d);
    QuadraticNumber out(d, a, b);
    if (out.to_cyclotomic() != x) fail(ErrorKind::Domain, "element does not lie in Q(sqrt " + std::to_string(d) + ")");
    return out;
}

std::string QuadraticNumber::to_string() const {
    mpz_class den = denominator();
    mpz_class an = mpq_class(a_ * den).get_num();
    mpz_class bn = mpq_class(b_ * den).get_num();
    std::ostringstream out;
    if (den != 1) out << "(";
    out << an.get_str();
    out << (bn < 0 ? " - " : " + ");
    mpz_class babs = abs(bn);
    out << babs.get_str() << "*sqrt(" << d_ << ")";
    if (den != 1) out << ")/" << den.get_str();
    return out.str();
}

// ------------------------------------------------------------ ExactPoly

ExactPoly::ExactPoly(std::vector<Cyclotomic> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

ExactPoly ExactPoly::constant(const Cyclotomic& c) { return ExactPoly({c}); }

ExactPoly ExactPoly::monomial(const Cyclotomic& c, unsigned n) {
    std::vector<Cyclotomic> v(n + 1, Cyclotomic(1));
    v[n] = c;
    return ExactPoly(std::move(v));
}

ExactPoly ExactPoly::from_integers(const std::vector<mpz_class>& coeffs) {
    std::vector<Cyclotomic> v;
    v.reserve(coeffs.size());
    for (const auto& c : coeffs) v.emplace_back(1, mpq_class(c));
    return ExactPoly(std::move(v));
}

void ExactPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

Cyclotomic ExactPoly::coeff(unsigned i) const { return i < coeffs_.size() ? coeffs_[i] : Cyclotomic(1); }

ExactPoly& ExactPoly::operator+=(const ExactPoly& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Cyclotomic(1));
    for (size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
    trim();
    return *this;
}

ExactPoly& ExactPoly::operator-=(const ExactPoly& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), Cyclotomic(1));
    for (size_t i = 0; i < rhs.coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
    trim();
    return *this;
}

ExactPoly& ExactPoly::operator*=(const ExactPoly& rhs) {
    if (is_zero() || rhs.is_zero()) {
        coeffs_.clear();
        return *this;
    }
    std::vector<Cyclotomic> out(coeffs_.size() + rhs.coeffs_.size() - 1, Cyclotomic(1));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
    coeffs_ = std::move(out);
    trim();
    return *this;
}

bool operator==(const ExactPoly& a, const ExactPoly& b) {
    if (a.coeffs_.size() != b.coeffs_.size()) return false;
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
        if (a.coeffs_[i] != b.coeffs_[i]) return false;
    return true;
}

Cyclotomic ExactPoly::eval(const Cyclotomic& x) const {
    Cyclotomic acc(x.order());
    for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
}

ExactPoly ExactPoly::derivative() const {
    if (coeffs_.size() <= 1) return ExactPoly();
    std::vector<Cyclotomic> out;
    for (size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * mpq_class(static_cast<long>(i)));
    return ExactPoly(std::move(out));
}

std::vector<mpz_class> ExactPoly::integer_coeffs() const {
    std::vector<mpz_class> out;
    for (const auto& c : coeffs_) {
        mpq_class q = c.rational_value();
        if (q.get_den() != 1) fail(ErrorKind::Domain, "polynomial coefficient is not an integer");
        out.push_back(q.get_num());
    }
    return out;
}

std::string ExactPoly::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero()) continue;
        if (!first) out << " + ";
        first = false;
        out << "(" << coeffs_[i].to_string() << ")";
        if (i >= 1) out << "*X";
        if (i >= 2) out << "^" << i;
    }
    return out.str();
}

// ------------------------------------------------------------ embedding

BallComplex embed_complex(const Cyclotomic& x, long digits) {
    if (digits < 1) fail(ErrorKind::Domain, "digits must be positive");
    size_t max_bits = 1;
    for (const auto& c : x.coeffs())
        max_bits = std::max({max_bits, mpz_sizeinbase(c.get_num_mpz_t(), 2), mpz_sizeinbase(c.get_den_mpz_t(), 2)});
    mpfr_prec_t prec = bits_for_digits(digits) + static_cast<mpfr_prec_t>(2 * max_bits) + 32;
    BallComplex acc(BallReal(0L, prec), BallReal(0L, prec));
    if (x.is_rational()) return BallComplex(BallReal(x.coeffs()[0], prec), BallReal(0L, prec));
    BallReal two_pi_over_n = BallReal::pi(prec).mul_2exp(1) / BallReal(x.order(), prec);
    for (size_t k = 0; k < x.coeffs().size(); ++k) {
        const mpq_class& c = x.coeffs()[k];
        if (c == 0) continue;
        BallReal cr(c, prec);
        if (k == 0) {
            acc += BallComplex(cr, BallReal(0L, prec));
            continue;
        }
        acc += expi(two_pi_over_n * BallReal(static_cast<long>(k), prec)) * cr;
    }
    return acc;
}

BallComplex embed_complex(const QuadraticNumber& x, long digits) {
    if (digits < 1) fail(ErrorKind::Domain, "digits must be positive");
    size_t bits = std::max({mpz_sizeinbase(x.a().get_num_mpz_t(), 2), mpz_sizeinbase(x.a().get_den_mpz_t(), 2),
                            mpz_sizeinbase(x.b().get_num_mpz_t(), 2), mpz_sizeinbase(x.b().get_den_mpz_t(), 2)});
    mpfr_prec_t prec = bits_for_digits(digits) + static_cast<mpfr_prec_t>(2 * bits) + 32;
    long d = x.d();
    BallReal root = sqrt(BallReal(d < 0 ? -d : d, prec));
    BallReal a(x.a(), prec);
    BallReal b = BallReal(x.b(), prec) * root;
    if (d < 0) return BallComplex(a, b);
    return BallComplex(a + b, BallReal(0L, prec));
}

// ------------------------------------------------------- factorization

namespace {

const mpz_class& two_pow_64() {
    static const mpz_class v = mpz_class(1) << 64;
    return v;
}

bool miller_rabin(const mpz_class& n, unsigned long base) {
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    mpz_class x;
    mpz_class b(base);
    mpz_powm(x.get_mpz_t(), b.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n - 1) return true;
    for (unsigned long r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == n - 1) return true;
    }
    return false;
}

std::vector<unsigned long> small_primes(unsigned long limit) {
    std::vector<bool> sieve(limit + 1, true);
    std::vector<unsigned long> out;
    for (unsigned long i = 2; i <= limit; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (unsigned long j = i * i; j <= limit; j += i) sieve[j] = false;
    }
    return out;
}

mpz_class pollard_brent(const mpz_class& n, std::mt19937_64& rng, std::chrono::steady_clock::time_point deadline) {
    if (mpz_even_p(n.get_mpz_t())) return 2;
    for (;;) {
        mpz_class y = mpz_class(static_cast<unsigned long>(rng() % 1000000007UL)) % n;
        mpz_class c = mpz_class(static_cast<unsigned long>(rng() % 1000000007UL + 1)) % n;
        const unsigned long m = 128;
        mpz_class g = 1, r = 1, q = 1, x, ys;
        while (g == 1) {
            x = y;
            for (mpz_class i = 0; i < r; ++i) y = (y * y + c) % n;
            mpz_class k = 0;
            while (k < r && g == 1) {
                ys = y;
                mpz_class lim = std::min(mpz_class(m), mpz_class(r - k));
                for (mpz_class i = 0; i < lim; ++i) {
                    y = (y * y + c) % n;
                    mpz_class diff = abs(x - y);
                    q = q * diff % n;
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                k += m;
                if (std::chrono::steady_clock::now() > deadline) return 0;
            }
            r *= 2;
        }
        if (g == n) {
            do {
                ys = (ys * ys + c) % n;
                mpz_class diff = abs(x - ys);
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

}  // namespace

bool is_probable_prime(const mpz_class& n) {
    if (n < 2) return false;
    static const unsigned long bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (unsigned long p : bases) {
        if (n == p) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    if (n < two_pow_64()) {
        for (unsigned long b : bases)
            if (!miller_rabin(n, b)) return false;
        return true;
    }
    return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

std::vector<PrimeFactor> factor_integer(const mpz_class& n, std::chrono::milliseconds budget) {
    if (n < 1) fail(ErrorKind::Domain, "factor_integer needs a positive integer");
    auto deadline = std::chrono::steady_clock::now() + budget;
    std::map<mpz_class, unsigned> found;
    mpz_class m = n;
    static const std::vector<unsigned long> primes = small_primes(100000);
    for (unsigned long p : primes) {
        if (m == 1) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            m /= p;
            ++found[mpz_class(p)];
        }
    }
    std::vector<mpz_class> pending;
    if (m != 1) pending.push_back(m);
    std::mt19937_64 rng(0x5eed);
    while (!pending.empty()) {
        mpz_class c = pending.back();
        pending.pop_back();
        if (is_probable_prime(c)) {
            ++found[c];
            continue;
        }
        if (mpz_perfect_power_p(c.get_mpz_t())) {
            for (unsigned long k = mpz_sizeinbase(c.get_mpz_t(), 2); k >= 2; --k) {
                mpz_class root;
                if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), k)) {
                    for (unsigned long i = 0; i < k; ++i) pending.push_back(root);
                    break;
                }
            }
            continue;
        }
        mpz_class d = pollard_brent(c, rng, deadline);
        if (d == 0) {
            std::ostringstream msg;
            msg << "time budget exhausted; unfactored cofactor " << c.get_str() << "; partial:";
            for (auto& [p, e] : found) msg << " " << p.get_str() << "^" << e;
            fail(ErrorKind::ResourceLimit, msg.str());
        }
        pending.push_back(d);
        pending.push_back(c / d);
    }
    std::vector<PrimeFactor> out;
    for (auto& [p, e] : found) out.push_back({p, e, p >= two_pow_64()});
    return out;
}

}  // namespace symsq
