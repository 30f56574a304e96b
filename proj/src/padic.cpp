#include "symsq/padic.hpp"

#include <climits>
#include <sstream>

#include "symsq/error.hpp"

namespace symsq {

namespace {

mpz_class ppow(const mpz_class& p, long n) {
    if (n < 0) fail(ErrorKind::Domain, "negative exponent in p^n");
    mpz_class out;
    mpz_pow_ui(out.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(n));
    return out;
}

mpz_class modp(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class inv_mod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        fail(ErrorKind::Domain, "not invertible modulo " + m.get_str());
    return r;
}

// Strip factors of p; returns the count.
long strip(mpz_class& n, const mpz_class& p) {
    if (n == 0) fail(ErrorKind::Domain, "valuation of zero");
    return static_cast<long>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

mpz_class eval_mod(const std::vector<mpz_class>& f, const mpz_class& x, const mpz_class& m) {
    mpz_class acc = 0;
    for (size_t i = f.size(); i-- > 0;) acc = modp(acc * x + f[i], m);
    return acc;
}

std::vector<mpz_class> derivative(const std::vector<mpz_class>& f) {
    std::vector<mpz_class> out;
    for (size_t i = 1; i < f.size(); ++i) out.push_back(f[i] * static_cast<unsigned long>(i));
    return out;
}

}  // namespace

long padic_valuation(const mpz_class& n, const mpz_class& p) {
    if (n == 0) return LONG_MAX;
    mpz_class t = n;
    return strip(t, p);
}

long padic_valuation(const mpq_class& q, const mpz_class& p) {
    if (q == 0) return LONG_MAX;
    return padic_valuation(q.get_num(), p) - padic_valuation(q.get_den(), p);
}

// ----------------------------------------------------------- PadicNumber

PadicNumber PadicNumber::exact_zero(const mpz_class& p) {
    PadicNumber out;
    out.p_ = p;
    return out;
}

PadicNumber PadicNumber::approximate_zero(const mpz_class& p, long n) {
    PadicNumber out;
    out.p_ = p;
    out.exact_zero_ = false;
    out.val_ = n;
    out.rel_ = 0;
    out.unit_ = 0;
    return out;
}

PadicNumber PadicNumber::from_rational(const mpz_class& p, const mpq_class& q, long rel) {
    if (q == 0) return exact_zero(p);
    if (rel < 1) fail(ErrorKind::Domain, "relative precision must be positive");
    mpz_class num = q.get_num(), den = q.get_den();
    long v = strip(num, p) - strip(den, p);
    PadicNumber out;
    out.p_ = p;
    out.exact_zero_ = false;
    out.val_ = v;
    out.rel_ = rel;
    mpz_class m = ppow(p, rel);
    out.unit_ = modp(num * inv_mod(den, m), m);
    return out;
}

PadicNumber PadicNumber::from_residue(const mpz_class& p, const mpz_class& value, long abs_prec) {
    mpz_class m = ppow(p, abs_prec);
    mpz_class r = modp(value, m);
    if (r == 0) return approximate_zero(p, abs_prec);
    long v = strip(r, p);
    PadicNumber out;
    out.p_ = p;
    out.exact_zero_ = false;
    out.val_ = v;
    out.rel_ = abs_prec - v;
    out.unit_ = r;
    return out;
}

void PadicNumber::normalize() {
    if (exact_zero_) return;
    if (rel_ <= 0) {
        long n = val_ + rel_;
        val_ = n;
        rel_ = 0;
        unit_ = 0;
        return;
    }
    unit_ = modp(unit_, ppow(p_, rel_));
    if (unit_ == 0) {
        val_ += rel_;
        rel_ = 0;
        return;
    }
    long v = strip(unit_, p_);
    val_ += v;
    rel_ -= v;
}

void PadicNumber::check_same_prime(const PadicNumber& rhs) const {
    if (p_ != rhs.p_) fail(ErrorKind::Domain, "mixing p-adic numbers for different primes");
}

long PadicNumber::valuation() const { return exact_zero_ ? LONG_MAX : val_; }

long PadicNumber::absolute_precision() const { return exact_zero_ ? LONG_MAX : val_ + rel_; }

mpz_class PadicNumber::digit(long e) const {
    if (exact_zero_) return 0;
    if (e >= absolute_precision()) fail(ErrorKind::Domain, "digit beyond the known precision");
    if (e < val_) return 0;
    mpz_class q = unit_;
    mpz_class pe = ppow(p_, e - val_);
    mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), pe.get_mpz_t());
    return modp(q, p_);
}

mpz_class PadicNumber::residue(long n) const {
    if (exact_zero_) return 0;
    if (n > absolute_precision()) fail(ErrorKind::Domain, "residue beyond the known precision");
    if (val_ < 0) fail(ErrorKind::Denominator, "residue of a non-integral p-adic number");
    mpz_class m = ppow(p_, n);
    return modp(ppow(p_, val_) * unit_, m);
}

bool PadicNumber::equals_mod(const PadicNumber& other, long n) const {
    check_same_prime(other);
    if (absolute_precision() < n || other.absolute_precision() < n)
        fail(ErrorKind::Domain, "insufficient p-adic precision for comparison");
    PadicNumber d = *this - other;
    return d.is_exact_zero() || d.valuation() >= n;
}

PadicNumber PadicNumber::truncate(long n) const {
    if (exact_zero_) return approximate_zero(p_, n);
    if (n >= absolute_precision()) return *this;
    PadicNumber out(*this);
    out.rel_ = n - val_;
    out.normalize();
    return out;
}

PadicNumber PadicNumber::operator-() const {
    PadicNumber out(*this);
    if (!exact_zero_ && rel_ > 0) out.unit_ = modp(-unit_, ppow(p_, rel_));
    return out;
}

PadicNumber& PadicNumber::operator+=(const PadicNumber& rhs) {
    check_same_prime(rhs);
    if (rhs.exact_zero_) return *this;
    if (exact_zero_) return *this = rhs;
    long n = std::min(absolute_precision(), rhs.absolute_precision());
    long v = std::min(val_, rhs.val_);
    if (n <= v) return *this = approximate_zero(p_, n);
    mpz_class s = unit_ * ppow(p_, val_ - v) + rhs.unit_ * ppow(p_, rhs.val_ - v);
    val_ = v;
    rel_ = n - v;
    unit_ = s;
    normalize();
    return *this;
}

PadicNumber& PadicNumber::operator*=(const PadicNumber& rhs) {
    check_same_prime(rhs);
    if (exact_zero_ || rhs.exact_zero_) return *this = exact_zero(p_);
    if (is_zero() || rhs.is_zero()) {
        return *this = approximate_zero(p_, val_ + rhs.val_);
    }
    val_ += rhs.val_;
    rel_ = std::min(rel_, rhs.rel_);
    unit_ = unit_ * rhs.unit_;
    normalize();
    return *this;
}

PadicNumber PadicNumber::inverse() const {
    if (is_zero()) fail(ErrorKind::Domain, "inverse of a p-adic zero");
    PadicNumber out(*this);
    out.val_ = -val_;
    out.unit_ = inv_mod(unit_, ppow(p_, rel_));
    return out;
}

PadicNumber PadicNumber::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    PadicNumber result = from_rational(p_, 1, std::max(rel_, 1L));
    if (is_zero() && e > 0) {
        if (exact_zero_) return exact_zero(p_);
        return approximate_zero(p_, val_ * e);
    }
    PadicNumber base(*this);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return result;
}

std::string PadicNumber::to_string(long max_terms) const {
    if (exact_zero_) return "0";
    std::ostringstream out;
    std::string ps = p_.get_str();
    long n = absolute_precision();
    long shown = 0;
    bool first = true;
    for (long e = val_; e < n; ++e) {
        if (max_terms >= 0 && shown >= max_terms) break;
        mpz_class c = digit(e);
        ++shown;
        if (c == 0) continue;
        if (!first) out << " + ";
        first = false;
        out << c.get_str();
        if (e == 1) {
            out << "*" << ps;
        } else if (e != 0) {
            out << "*" << ps << "^" << e;
        }
    }
    if (!first) out << " + ";
    long shown_to = (max_terms >= 0) ? std::min(n, val_ + max_terms) : n;
    out << "O(" << ps << "^" << shown_to << ")";
    return out.str();
}

// ------------------------------------------------------------- Hensel

PadicNumber hensel_root(const ExactPoly& f, const mpz_class& p, const mpz_class& r0, long k) {
    if (k < 1) fail(ErrorKind::Domain, "precision must be positive");
    std::vector<mpz_class> c = f.integer_coeffs();
    std::vector<mpz_class> dc = derivative(c);
    if (eval_mod(c, r0, p) != 0) fail(ErrorKind::Domain, "initial residue is not a root modulo p");
    if (eval_mod(dc, r0, p) == 0) fail(ErrorKind::NonSimpleRoot, "derivative vanishes at the root modulo p");
    mpz_class r = modp(r0, p);
    long prec = 1;
    while (prec < k) {
        prec = std::min(2 * prec, k);
        mpz_class m = ppow(p, prec);
        mpz_class fr = eval_mod(c, r, m);
        mpz_class dr = eval_mod(dc, r, m);
        r = modp(r - fr * inv_mod(dr, m), m);
    }
    if (eval_mod(c, r, ppow(p, k)) != 0) fail(ErrorKind::Inconsistency, "Newton iteration failed to converge");
    return PadicNumber::from_residue(p, r, k);
}

// ---------------------------------------------------------- embeddings

PadicEmbedding make_embedding(long d, const mpz_class& p, const mpz_class& gen_a, const mpz_class& gen_b, long k) {
    if (!is_probable_prime(p) || p == 2) fail(ErrorKind::Domain, "embedding needs an odd prime");
    if (modp(mpz_class(d), p) == 0) fail(ErrorKind::Ramified, "p divides d");
    if (modp(gen_b, p) == 0) fail(ErrorKind::Domain, "generator has b divisible by p");
    mpz_class r0 = modp(-gen_a * inv_mod(gen_b, p), p);
    if (modp(r0 * r0 - d, p) != 0)
        fail(ErrorKind::Domain, "generator " + gen_a.get_str() + " + " + gen_b.get_str() + "*sqrt(" +
                                    std::to_string(d) + ") does not lie above " + p.get_str());
    PadicEmbedding emb;
    emb.d = d;
    emb.p = p;
    emb.gen_a = gen_a;
    emb.gen_b = gen_b;
    emb.precision = k;
    emb.root = hensel_root(ExactPoly::from_integers({mpz_class(-d), 0, 1}), p, r0, k);
    return emb;
}

PadicNumber embed_quadratic(const QuadraticNumber& x, const PadicEmbedding& emb) {
    if (x.d() != emb.d) fail(ErrorKind::Domain, "quadratic field does not match the embedding");
    if (mpz_divisible_p(x.denominator().get_mpz_t(), emb.p.get_mpz_t()))
        fail(ErrorKind::Denominator, "denominator of " + x.to_string() + " is divisible by " + emb.p.get_str());
    PadicNumber a = PadicNumber::from_rational(emb.p, x.a(), emb.precision);
    PadicNumber b = PadicNumber::from_rational(emb.p, x.b(), emb.precision);
    return a + b * emb.root;
}

PadicNumber embed_cyclotomic(const Cyclotomic& x, const PadicEmbedding& emb) {
    if (x.is_rational()) {
        mpq_class q = x.rational_value();
        if (mpz_divisible_p(q.get_den_mpz_t(), emb.p.get_mpz_t()))
            fail(ErrorKind::Denominator, "denominator divisible by p");
        return PadicNumber::from_rational(emb.p, q, emb.precision);
    }
    return embed_quadratic(QuadraticNumber::from_cyclotomic(x, emb.d), emb);
}

RootOfUnityEmbedding make_root_embedding(const mpz_class& p, long m, long k) {
    if (!is_probable_prime(p)) fail(ErrorKind::Domain, "root embedding needs a prime");
    mpz_class pm1 = p - 1;
    if (!mpz_divisible_ui_p(pm1.get_mpz_t(), static_cast<unsigned long>(m)))
        fail(ErrorKind::Domain, "m does not divide p - 1");
    auto factors = factor_integer(pm1);
    mpz_class g = 2;
    if (p == 2) g = 1;
    for (; g < p; ++g) {
        bool primitive = true;
        for (const auto& pf : factors) {
            mpz_class e = pm1 / pf.prime, t;
            mpz_powm(t.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
            if (t == 1) {
                primitive = false;
                break;
            }
        }
        if (primitive) break;
    }
    mpz_class z0;
    mpz_class e = pm1 / m;
    mpz_powm(z0.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    std::vector<mpz_class> poly(m + 1, 0);
    poly[0] = -1;
    poly[m] = 1;
    RootOfUnityEmbedding emb;
    emb.p = p;
    emb.m = m;
    emb.precision = k;
    emb.zeta = hensel_root(ExactPoly::from_integers(poly), p, z0, k);
    return emb;
}

RootOfUnityEmbedding root_embedding_from_quadratic(const PadicEmbedding& emb, long m) {
    if (emb.d != -3 || (m != 3 && m != 6)) fail(ErrorKind::Domain, "only Q(sqrt -3) -> Q(zeta_3) is supported");
    PadicNumber half = PadicNumber::from_rational(emb.p, mpq_class(1, 2), emb.precision);
    PadicNumber one = PadicNumber::from_rational(emb.p, 1, emb.precision);
    RootOfUnityEmbedding out;
    out.p = emb.p;
    out.m = m;
    out.precision = emb.precision;
    // zeta_3 = (-1 + sqrt(-3))/2, zeta_6 = (1 + sqrt(-3))/2
    out.zeta = (m == 3 ? (emb.root - one) : (emb.root + one)) * half;
    return out;
}

PadicNumber embed_cyclotomic(const Cyclotomic& x, const RootOfUnityEmbedding& emb) {
    if (emb.m % x.order() != 0) fail(ErrorKind::Domain, "cyclotomic order does not divide the embedding order");
    Cyclotomic y = x.lift(emb.m);
    PadicNumber acc = PadicNumber::exact_zero(emb.p);
    PadicNumber power = PadicNumber::from_rational(emb.p, 1, emb.precision);
    for (const auto& c : y.coeffs()) {
        if (c != 0) {
            if (mpz_divisible_p(c.get_den_mpz_t(), emb.p.get_mpz_t()))
                fail(ErrorKind::Denominator, "denominator divisible by p");
            acc += PadicNumber::from_rational(emb.p, c, emb.precision) * power;
        }
        power *= emb.zeta;
    }
    return acc;
}

// ---------------------------------------------------------- group ring

GroupRingElt::GroupRingElt(const mpz_class& p, long k, std::vector<long> cyclic_orders)
    : p_(p), k_(k), mod_(ppow(p, k)), orders_(std::move(cyclic_orders)) {
    long n = 1;
    for (long o : orders_) {
        if (o < 1) fail(ErrorKind::Domain, "cyclic factor order must be positive");
        n *= o;
    }
    coeffs_.assign(n, mpz_class(0));
}

GroupRingElt GroupRingElt::one(const mpz_class& p, long k, std::vector<long> cyclic_orders) {
    GroupRingElt out(p, k, std::move(cyclic_orders));
    out.coeffs_[0] = 1;
    return out;
}

GroupRingElt GroupRingElt::term(const mpz_class& p, long k, std::vector<long> cyclic_orders, const mpz_class& u,
                                const std::vector<long>& exponents) {
    GroupRingElt out(p, k, std::move(cyclic_orders));
    out.coeffs_[out.index_of(exponents)] = modp(u, out.mod_);
    return out;
}

long GroupRingElt::index_of(const std::vector<long>& exponents) const {
    if (exponents.size() != orders_.size()) fail(ErrorKind::Domain, "exponent vector has the wrong length");
    long index = 0, stride = 1;
    for (size_t i = 0; i < orders_.size(); ++i) {
        index += mod_pos(exponents[i], orders_[i]) * stride;
        stride *= orders_[i];
    }
    return index;
}

std::vector<long> GroupRingElt::exponents_of(long index) const {
    std::vector<long> e(orders_.size());
    for (size_t i = 0; i < orders_.size(); ++i) {
        e[i] = index % orders_[i];
        index /= orders_[i];
    }
    return e;
}

long GroupRingElt::multiply_index(long i, long j) const {
    long index = 0, stride = 1;
    for (long o : orders_) {
        index += ((i % o + j % o) % o) * stride;
        i /= o;
        j /= o;
        stride *= o;
    }
    return index;
}

mpz_class GroupRingElt::augmentation() const {
    mpz_class s = 0;
    for (const auto& c : coeffs_) s += c;
    return modp(s, mod_);
}

bool GroupRingElt::is_one() const {
    if (coeffs_[0] != 1) return false;
    for (size_t i = 1; i < coeffs_.size(); ++i)
        if (coeffs_[i] != 0) return false;
    return true;
}

void GroupRingElt::check_compatible(const GroupRingElt& rhs) const {
    if (mod_ != rhs.mod_ || orders_ != rhs.orders_) fail(ErrorKind::Domain, "group ring elements do not match");
}

GroupRingElt& GroupRingElt::operator+=(const GroupRingElt& rhs) {
    check_compatible(rhs);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] = modp(coeffs_[i] + rhs.coeffs_[i], mod_);
    return *this;
}

GroupRingElt& GroupRingElt::operator-=(const GroupRingElt& rhs) {
    check_compatible(rhs);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] = modp(coeffs_[i] - rhs.coeffs_[i], mod_);
    return *this;
}

GroupRingElt GroupRingElt::operator*(const GroupRingElt& rhs) const {
    check_compatible(rhs);
    GroupRingElt out(p_, k_, orders_);
    long n = group_order();
    for (long i = 0; i < n; ++i) {
        if (coeffs_[i] == 0) continue;
        for (long j = 0; j < n; ++j) {
            if (rhs.coeffs_[j] == 0) continue;
            long t = multiply_index(i, j);
            out.coeffs_[t] += coeffs_[i] * rhs.coeffs_[j];
        }
    }
    for (auto& c : out.coeffs_) c = modp(c, mod_);
    return out;
}

std::optional<GroupRingElt> groupring_invert(const GroupRingElt& x) {
    long n = x.group_order();
    const mpz_class& m = x.modulus();
    // column j = coefficients of x * g_j; row i picks g_i
    std::vector<std::vector<mpz_class>> a(n, std::vector<mpz_class>(n + 1, 0));
    for (long j = 0; j < n; ++j)
        for (long h = 0; h < n; ++h) {
            if (x[h] == 0) continue;
            a[x.multiply_index(h, j)][j] = x[h];
        }
    a[0][n] = 1;
    for (long c = 0; c < n; ++c) {
        long piv = -1;
        for (long r = c; r < n; ++r) {
            if (!mpz_divisible_p(a[r][c].get_mpz_t(), x.p().get_mpz_t())) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return std::nullopt;
        std::swap(a[piv], a[c]);
        mpz_class inv = inv_mod(a[c][c], m);
        for (long j = c; j <= n; ++j) a[c][j] = modp(a[c][j] * inv, m);
        for (long r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0) continue;
            mpz_class f = a[r][c];
            for (long j = c; j <= n; ++j) a[r][j] = modp(a[r][j] - f * a[c][j], m);
        }
    }
    GroupRingElt y(x.p(), x.k(), x.orders());
    for (long i = 0; i < n; ++i) y[i] = a[i][n];
    if (!(x * y).is_one()) fail(ErrorKind::Inconsistency, "group ring inverse failed verification");
    return y;
}

}  // namespace symsq
