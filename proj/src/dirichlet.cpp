#include "symsq/dirichlet.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "symsq/error.hpp"

namespace symsq {

namespace {

std::vector<std::pair<long, int>> factor_small(long n) {
    std::vector<std::pair<long, int>> out;
    for (long q = 2; q * q <= n; ++q) {
        int e = 0;
        while (n % q == 0) {
            n /= q;
            ++e;
        }
        if (e) out.emplace_back(q, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

long powmod(long b, long e, long m) {
    __int128 r = 1 % m, x = mod_pos(b, m);
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<long>(r);
}

long group_order_mod(long g, long m, long phi) {
    // smallest d | phi with g^d = 1
    long best = phi;
    for (const auto& [q, e] : factor_small(phi)) {
        (void)e;
        while (best % q == 0 && powmod(g, best / q, m) == 1) best /= q;
    }
    return best;
}

// Local factor of the Conrey numbering at q^e.
struct LocalPart {
    long q, e, qe, den;
    std::vector<long> dlog;  // odd q: log_g; q = 2, e >= 3: log_5 of +-x
};

LocalPart make_local(long q, int e) {
    LocalPart lp{q, e, ipow(q, e), 1, {}};
    if (q == 2) {
        if (e == 1) lp.den = 1;
        else if (e == 2) lp.den = 2;
        else {
            lp.den = lp.qe / 4;
            lp.dlog.assign(lp.qe, -1);
            long x = 1;
            for (long b = 0; b < lp.den; ++b) {
                lp.dlog[x] = b;
                x = x * 5 % lp.qe;
            }
        }
        return lp;
    }
    long phi = lp.qe / q * (q - 1);
    long g = 2;
    while (group_order_mod(g, lp.qe, phi) != phi) ++g;
    lp.den = phi;
    lp.dlog.assign(lp.qe, -1);
    long x = 1;
    for (long b = 0; b < phi; ++b) {
        lp.dlog[x] = b;
        x = x * g % lp.qe;
    }
    return lp;
}

// numerator over lp.den of the angle of chi_{q^e}(i, a)
long local_angle(const LocalPart& lp, long i, long a) {
    i = mod_pos(i, lp.qe);
    a = mod_pos(a, lp.qe);
    if (lp.q == 2) {
        if (lp.e == 1) return 0;
        if (lp.e == 2) return (i % 4 == 3 && a % 4 == 3) ? 1 : 0;
        int ei = (i % 4 == 1) ? 1 : -1, ea = (a % 4 == 1) ? 1 : -1;
        long bi = lp.dlog[ei == 1 ? i : lp.qe - i], ba = lp.dlog[ea == 1 ? a : lp.qe - a];
        long n = (bi * ba) % lp.den;
        // extra 1/2 when both are -1 mod 4
        if (ei == -1 && ea == -1) n += lp.den / 2;
        return n % lp.den;
    }
    return static_cast<long>((static_cast<__int128>(lp.dlog[i]) * lp.dlog[a]) % lp.den);
}

}  // namespace

DirichletCharacter DirichletCharacter::conrey(long modulus, long index) {
    if (modulus < 1) fail(ErrorKind::Domain, "modulus must be positive");
    if (std::gcd(mod_pos(index, modulus), modulus) != 1 && modulus > 1)
        fail(ErrorKind::Domain, "Conrey index must be coprime to the modulus");
    DirichletCharacter chi;
    chi.modulus_ = modulus;
    chi.index_ = modulus == 1 ? 1 : mod_pos(index, modulus);
    std::vector<LocalPart> parts;
    long big = 1;
    for (const auto& [q, e] : factor_small(modulus)) {
        parts.push_back(make_local(q, e));
        big = std::lcm(big, parts.back().den);
    }
    std::vector<long> num(modulus, -1);
    long g = big;
    for (long a = 0; a < modulus; ++a) {
        if (std::gcd(a, modulus) != 1 && modulus > 1) continue;
        long n = 0;
        for (const auto& lp : parts) n = (n + local_angle(lp, chi.index_, a) * (big / lp.den)) % big;
        num[a] = n;
        g = std::gcd(g, n);
    }
    long order = big / std::gcd(big, g);
    chi.order_ = order;
    chi.exps_.assign(modulus, -1);
    long scale = big / order;
    for (long a = 0; a < modulus; ++a)
        if (num[a] >= 0) chi.exps_[a] = num[a] / scale;
    // conductor: least M | N with chi trivial on the kernel of reduction mod M
    chi.conductor_ = modulus;
    for (long m = 1; m <= modulus; ++m) {
        if (modulus % m) continue;
        bool trivial = true;
        for (long a = 1 % modulus; a < modulus && trivial; a += m)
            if (chi.exps_[a] > 0) trivial = false;
        if (modulus == 1) trivial = true;
        if (trivial) {
            chi.conductor_ = m;
            break;
        }
    }
    return chi;
}

DirichletCharacter DirichletCharacter::parse(const std::string& label) {
    auto dot = label.find('.');
    if (dot == std::string::npos) fail(ErrorKind::Parse, "character label must look like N.i: " + label);
    try {
        size_t used1 = 0, used2 = 0;
        long n = std::stol(label.substr(0, dot), &used1);
        long i = std::stol(label.substr(dot + 1), &used2);
        if (used1 != dot || used2 != label.size() - dot - 1) throw std::invalid_argument("trailing");
        return conrey(n, i);
    } catch (const std::logic_error&) {
        fail(ErrorKind::Parse, "character label must look like N.i: " + label);
    }
}

DirichletCharacter DirichletCharacter::from_generator_value(long modulus, long g, long num, long den) {
    if (den <= 0) fail(ErrorKind::Domain, "denominator must be positive");
    std::vector<long> hits;
    for (long i = 1; i <= std::max(1L, modulus); ++i) {
        if (std::gcd(i, modulus) != 1) continue;
        DirichletCharacter c = conrey(modulus, i);
        long e = c.exponent(g);
        if (e < 0) fail(ErrorKind::Domain, "generator is not a unit modulo N");
        __int128 diff = static_cast<__int128>(e) * den - static_cast<__int128>(num) * c.order();
        __int128 m = static_cast<__int128>(c.order()) * den;
        if (diff % m == 0) hits.push_back(i);
        if (modulus == 1) break;
    }
    if (hits.size() != 1)
        fail(ErrorKind::Domain, std::to_string(hits.size()) + " characters modulo " + std::to_string(modulus) +
                                    " match the prescribed value");
    return conrey(modulus, hits[0]);
}

int DirichletCharacter::parity() const { return exps_[mod_pos(-1, modulus_)] == 0 ? 1 : -1; }

std::string DirichletCharacter::label() const { return std::to_string(modulus_) + "." + std::to_string(index_); }

long DirichletCharacter::exponent(long a) const { return exps_[mod_pos(a, modulus_)]; }

Cyclotomic DirichletCharacter::value(long a) const {
    long e = exponent(a);
    if (e < 0) return Cyclotomic(1, 0);
    return Cyclotomic::zeta(order_, e);
}

DirichletCharacter DirichletCharacter::primitive() const {
    if (conductor_ == 1) return conrey(1, 1);
    if (conductor_ == modulus_) return *this;
    for (long j = 1; j < conductor_; ++j) {
        if (std::gcd(j, conductor_) != 1) continue;
        DirichletCharacter c = conrey(conductor_, j);
        if (c.order_ != order_) continue;
        bool same = true;
        for (long a = 1; a < modulus_ && same; ++a)
            if (exps_[a] >= 0 && c.exponent(a) != exps_[a]) same = false;
        if (same) return c;
    }
    fail(ErrorKind::Inconsistency, "no primitive character of conductor " + std::to_string(conductor_) +
                                       " induces " + label());
}

DirichletCharacter DirichletCharacter::conj() const {
    if (modulus_ == 1) return *this;
    mpz_class inv;
    mpz_class i = index_, n = modulus_;
    mpz_invert(inv.get_mpz_t(), i.get_mpz_t(), n.get_mpz_t());
    return conrey(modulus_, inv.get_si());
}

DirichletCharacter DirichletCharacter::pow(long e) const {
    if (e < 0) return conj().pow(-e);
    return conrey(modulus_, powmod(index_, e, modulus_));
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& rhs) const {
    if (modulus_ != rhs.modulus_) fail(ErrorKind::Domain, "product of characters with different moduli");
    return conrey(modulus_, static_cast<long>(static_cast<__int128>(index_) * rhs.index_ % modulus_));
}

std::string DirichletCharacter::table_csv() const {
    std::ostringstream out;
    out << "a,value\n";
    for (long a = 0; a < modulus_; ++a) out << a << ',' << value(a).to_string() << '\n';
    return out.str();
}

Cyclotomic gauss_sum(const DirichletCharacter& chi) {
    DirichletCharacter p = chi.primitive();
    long n = p.modulus();
    if (n == 1) return Cyclotomic(1, 1);
    long l = std::lcm(n, p.order());
    std::vector<mpq_class> counts(l, 0);
    for (long a = 1; a < n; ++a) {
        long e = p.exponent(a);
        if (e < 0) continue;
        counts[(e * (l / p.order()) + a * (l / n)) % l] += 1;
    }
    Cyclotomic out(l, 0);
    for (long k = 0; k < l; ++k)
        if (counts[k] != 0) out += Cyclotomic::zeta(l, k) * counts[k];
    return out;
}

mpq_class bernoulli_polynomial(unsigned n, const mpq_class& x) {
    // Horner over sum_j binom(n, j) B_j x^{n-j}
    mpq_class acc = 0;
    mpz_class binom = 1;
    for (unsigned j = 0; j <= n; ++j) {
        acc = acc * x + binom * bernoulli_number(j);
        binom = binom * (n - j) / (j + 1);
    }
    return acc;
}

Cyclotomic gen_bernoulli(unsigned n, const DirichletCharacter& chi) {
    long m = chi.modulus();
    long ord = chi.order();
    // power sums over each value class: P_e(t) = sum_{chi(a) = zeta^e} a^t
    std::vector<std::vector<mpz_class>> psum(ord, std::vector<mpz_class>(n + 1, 0));
    for (long a = 1; a <= m; ++a) {
        long e = chi.exponent(a);
        if (e < 0) continue;
        mpz_class ap = 1;
        for (unsigned t = 0; t <= n; ++t) {
            psum[e][t] += ap;
            ap *= a;
        }
    }
    // N^{n-1} B_n(a/N) = (1/N) sum_j binom(n,j) B_j N^j a^{n-j}
    std::vector<mpq_class> coeff(ord, 0);
    mpz_class binom = 1, mj = 1;
    for (unsigned j = 0; j <= n; ++j) {
        mpq_class b = bernoulli_number(j);
        if (b != 0) {
            mpq_class w = b * binom * mj;
            for (long e = 0; e < ord; ++e)
                if (psum[e][n - j] != 0) coeff[e] += w * psum[e][n - j];
        }
        binom = binom * (n - j) / (j + 1);
        mj *= m;
    }
    Cyclotomic out(ord, 0);
    for (long e = 0; e < ord; ++e)
        if (coeff[e] != 0) out += Cyclotomic::zeta(ord, e) * mpq_class(coeff[e] / m);
    return out;
}

BallComplex hurwitz_zeta(const BallComplex& s, const BallReal& a, long digits) {
    if (!(s.re() - BallReal(1)).is_positive()) fail(ErrorKind::Domain, "Hurwitz zeta needs Re s > 1");
    if (!a.is_positive()) fail(ErrorKind::Domain, "Hurwitz zeta needs a > 0");
    double sabs = abs(s).abs_upper().mid_d();
    long m = static_cast<long>(std::ceil(digits / 1.8)) + 8;
    long n = m + static_cast<long>(std::ceil(sabs)) + 2;
    mpfr_prec_t prec = bits_for_digits(digits) + 40 + static_cast<mpfr_prec_t>(std::log2(sabs + 2) * 4);
    PrecisionGuard guard(prec);
    BallComplex sc(s.re().with_prec(prec), s.im().with_prec(prec));
    BallReal ap = a.with_prec(prec);
    BallComplex acc(0L, prec);
    for (long k = 0; k < n; ++k) acc += pow(ap + BallReal(k, prec), -sc);
    BallReal x = ap + BallReal(n, prec);
    BallComplex xs = pow(x, -sc);  // x^{-s}
    acc += xs * x / (sc - BallComplex(1L, prec));
    acc += xs / 2L;
    BallComplex rising = sc;  // (s)_{2k-1}
    BallReal xinv2 = BallReal(1L, prec) / sqr(x);
    BallComplex xpow = xs / x;  // x^{-s-2k+1}
    BallReal fact(2L, prec);
    for (long k = 1; k <= m; ++k) {
        BallReal coef = BallReal(bernoulli_number(static_cast<unsigned>(2 * k)), prec) / fact;
        acc += rising * xpow * coef;
        rising *= (sc + BallComplex(2 * k - 1, prec)) * (sc + BallComplex(2 * k, prec));
        xpow *= xinv2;
        fact *= BallReal((2 * k + 1) * (2 * k + 2), prec);
    }
    // |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} x^{1 - sigma - 2M} / (sigma + 2M - 1)
    BallReal sigma = s.re().abs_lower();
    if (!s.re().is_positive()) sigma = BallReal(1L, prec);
    BallComplex r2m = s;
    for (long j = 1; j < 2 * m; ++j) r2m *= (sc + BallComplex(j, prec));
    BallReal bound = BallReal(4L, prec) * abs(r2m).abs_upper() /
                     pow(BallReal::pi(prec).mul_2exp(1), 2 * m) *
                     pow(x, BallReal(1L, prec) - sigma - BallReal(2 * m, prec)) /
                     (sigma + BallReal(2 * m - 1, prec));
    acc.add_error(bound.abs_upper());
    return acc;
}

BallComplex dirichlet_L_stripped(const DirichletCharacter& chi, const BallComplex& s, const std::vector<long>& strip,
                                 long digits) {
    if (!(s.re() - BallReal(1)).is_positive()) fail(ErrorKind::Domain, "direct L-series needs Re s > 1");
    long nmod = chi.modulus();
    long work = digits + 5 + static_cast<long>(std::log10(static_cast<double>(nmod) + 1));
    PrecisionGuard guard(bits_for_digits(work) + 20);
    mpfr_prec_t prec = bits_for_digits(work) + 20;
    BallComplex acc(0L, prec);
    for (long a = 1; a <= nmod; ++a) {
        long e = chi.exponent(a);
        if (e < 0) continue;
        BallComplex h = hurwitz_zeta(s, BallReal(mpq_class(a, nmod), prec), work);
        acc += embed_complex(chi.value(a), work) * h;
    }
    acc *= pow(BallReal(nmod, prec), -s);
    for (long l : strip) {
        if (chi.exponent(l) < 0) continue;
        BallComplex f = BallComplex(1L, prec) - embed_complex(chi.value(l), work) * pow(BallReal(l, prec), -s);
        acc *= f;
    }
    return acc;
}

BallComplex dirichlet_L_stripped(const DirichletCharacter& chi, long s, const std::vector<long>& strip, long digits) {
    PrecisionGuard guard(bits_for_digits(digits) + 40);
    return dirichlet_L_stripped(chi, BallComplex(s), strip, digits);
}

namespace {

using Embedder = std::function<PadicNumber(const Cyclotomic&)>;

// Lagrange weights at 0 for nodes m0, ..., m0 + count - 1 (integers).
std::vector<mpz_class> extrapolation_weights(long m0, long count) {
    std::vector<mpz_class> w;
    for (long j = 0; j < count; ++j) {
        mpq_class c = 1;
        for (long i = 0; i < count; ++i) {
            if (i == j) continue;
            mpq_class f(-(m0 + i), (m0 + j) - (m0 + i));
            f.canonicalize();
            c *= f;
        }
        c.canonicalize();
        if (c.get_den() != 1) fail(ErrorKind::Inconsistency, "non-integral extrapolation weight");
        w.push_back(c.get_num());
    }
    return w;
}

PadicNumber kl_point(const DirichletCharacter& chi, long n, const mpz_class& p, long k, const Embedder& embed) {
    DirichletCharacter prim = chi.primitive();
    Cyclotomic b = gen_bernoulli(static_cast<unsigned>(n), prim);
    Cyclotomic val = b * mpq_class(-1, n);
    // denominators divisible by p are moved into a power of p
    mpz_class den = 1;
    for (const auto& c : val.coeffs()) den = lcm(den, mpz_class(c.get_den()));
    long v = padic_valuation(den, p);
    mpz_class pv;
    mpz_pow_ui(pv.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(v));
    PadicNumber x = embed(val * mpq_class(pv));
    if (v > 0) x *= PadicNumber::from_rational(p, mpq_class(1, pv), k);
    Cyclotomic chip = chi.value(p.get_si());
    if (!chip.is_zero()) {
        mpz_class pn;
        mpz_pow_ui(pn.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(n - 1));
        PadicNumber euler = PadicNumber::from_rational(p, 1, k) - embed(chip * mpq_class(pn));
        x *= euler;
    }
    return x;
}

KLValue kl_generic(const DirichletCharacter& chi, long s, const mpz_class& p, long k, long points,
                   const Embedder& embed) {
    if (points < 1) fail(ErrorKind::Domain, "at least one interpolation point is needed");
    if (chi.conductor() % p.get_si() == 0) fail(ErrorKind::Ramified, "p divides the conductor of the character");
    KLValue out;
    auto parity_ok = [&](long n) { return (n % 2 == 0 ? 1 : -1) == chi.parity(); };
    if (s <= 0) {
        long n = 1 - s;
        if (!parity_ok(n))
            fail(ErrorKind::ParityMismatch, "chi(-1) != (-1)^n at n = " + std::to_string(n));
        out.value = kl_point(chi, n, p, k, embed);
        out.exact_point = true;
        out.valid_exponent = LONG_MAX;
        out.indices = {n};
        return out;
    }
    long pm1 = p.get_si() - 1;
    long m0 = 1;
    while (1 - s + m0 * pm1 < 1) ++m0;
    if (!parity_ok(1 - s + m0 * pm1))
        fail(ErrorKind::ParityMismatch, "no interpolation point of matching parity in this component");
    std::vector<mpz_class> w = extrapolation_weights(m0, points);
    PadicNumber acc = PadicNumber::exact_zero(p);
    for (long j = 0; j < points; ++j) {
        long n = 1 - s + (m0 + j) * pm1;
        out.indices.push_back(n);
        acc += PadicNumber::from_rational(p, w[j], k) * kl_point(chi, n, p, k, embed);
    }
    out.value = acc.truncate(points);
    out.valid_exponent = points;
    return out;
}

}  // namespace

KLValue kl_padic_value(const DirichletCharacter& chi, long s, const PadicEmbedding& emb, long points) {
    return kl_generic(chi, s, emb.p, emb.precision, points,
                      [&](const Cyclotomic& x) { return embed_cyclotomic(x, emb); });
}

KLValue kl_padic_value(const DirichletCharacter& chi, long s, const RootOfUnityEmbedding& emb, long points) {
    return kl_generic(chi, s, emb.p, emb.precision, points,
                      [&](const Cyclotomic& x) { return embed_cyclotomic(x, emb); });
}

RegularityResult is_regular_prime(long p) {
    if (p < 3 || !is_probable_prime(mpz_class(p))) fail(ErrorKind::Domain, "regularity test needs an odd prime");
    RegularityResult res;
    long half = (p - 3) / 2;  // B_{2j} for 1 <= j <= half
    if (half < 1) return res;
    using u64 = unsigned long long;
    const u64 m = static_cast<u64>(p);
    auto inv = [&](u64 a) { return static_cast<u64>(powmod(static_cast<long>(a), p - 2, p)); };
    // factorials up to 2*half + 1 <= p - 2
    std::vector<u64> fact(2 * half + 2);
    fact[0] = 1;
    for (long i = 1; i < static_cast<long>(fact.size()); ++i) fact[i] = fact[i - 1] * static_cast<u64>(i) % m;
    std::vector<u64> c(half + 1), sden(half + 1), q(half + 1);
    for (long j = 0; j <= half; ++j) {
        c[j] = inv(fact[2 * j]);
        sden[j] = inv(fact[2 * j + 1]);
    }
    // q = c / s as power series in u = (t/2)^2
    for (long j = 0; j <= half; ++j) {
        unsigned __int128 acc = 0;
        for (long i = 1; i <= j; ++i) {
            acc += static_cast<unsigned __int128>(sden[i]) * q[j - i];
            if ((i & 63) == 0) acc %= m;
        }
        u64 r = static_cast<u64>(acc % m);
        q[j] = (c[j] + m - r) % m;
    }
    u64 inv4 = inv(4), scale = 1;
    for (long j = 1; j <= half; ++j) {
        scale = scale * inv4 % m;
        u64 b = q[j] * fact[2 * j] % m * scale % m;
        if (b == 0) res.irregular_indices.push_back(2 * j);
    }
    res.regular = res.irregular_indices.empty();
    return res;
}

}  // namespace symsq
