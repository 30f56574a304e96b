#include "symsq/symsq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "symsq/error.hpp"

namespace symsq {

namespace {

mpz_class ipow(long base, unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

mpq_class qpow(long base, long e) {
    if (e >= 0) return mpq_class(ipow(base, static_cast<unsigned long>(e)));
    mpq_class r(mpz_class(1), ipow(base, static_cast<unsigned long>(-e)));
    r.canonicalize();
    return r;
}

const mpz_class& a_prime(const HeckeData& f, long l) {
    auto it = f.a_prime.find(l);
    if (it == f.a_prime.end()) fail(ErrorKind::MissingPrime, "no eigenvalue for prime " + std::to_string(l));
    return it->second;
}

// l^{k-1} eps(l)
mpz_class hecke_const(const HeckeData& f, long l) {
    return f.eps(l) == 0 ? mpz_class(0) : ipow(l, static_cast<unsigned long>(f.weight - 1));
}

int eps_of(const HeckeData& f, long m) { return std::gcd(m, f.level) == 1 ? 1 : 0; }

std::vector<long> prime_divisors(long n) {
    std::vector<long> out;
    for (long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

BallReal sqrt3_upper() { return sqrt(BallReal(3L)); }

// log of an upper estimate for |z|; midpoints may underflow double range, so use MPFR exponents.
double log_abs(const BallComplex& z) {
    auto lg = [](mpfr_srcptr x) {
        if (mpfr_zero_p(x)) return -1e300;
        long e;
        double m = mpfr_get_d_2exp(&e, x, MPFR_RNDN);
        return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
    };
    double a = std::max(lg(z.re().mid()), lg(z.im().mid()));
    double r = std::max(lg(z.re().rad()), lg(z.im().rad()));
    return std::max(a, r) + 0.35;
}

}  // namespace

SymSqDescriptor make_descriptor(HeckeData f, DirichletCharacter chi, bool primitive) {
    if (primitive && f.level != 1)
        fail(ErrorKind::Domain, "primitive bad-prime factors are not available for level > 1");
    return SymSqDescriptor{std::move(f), std::move(chi), primitive};
}

ExactPoly euler_factor_symsq(const HeckeData& f, const DirichletCharacter& chi, long l) {
    long e = chi.exponent(l);
    if (e < 0) return ExactPoly::constant(Cyclotomic(1, 1));
    Cyclotomic x = chi.value(l);
    mpq_class a = a_prime(f, l);
    mpq_class c = hecke_const(f, l);
    mpq_class s1 = a * a - c;
    std::vector<Cyclotomic> co{Cyclotomic(1, 1), x * mpq_class(-s1), x.pow(2) * mpq_class(c * s1),
                               x.pow(3) * mpq_class(-c * c * c)};
    return ExactPoly(co);
}

FactorizationCheck factorization_identity_check(const HeckeData& f, const DirichletCharacter& psi, long l) {
    constexpr int R = 8;
    FactorizationCheck out;
    out.symsq_factor = euler_factor_symsq(f, psi, l);
    Cyclotomic x = psi.exponent(l) < 0 ? Cyclotomic(1, 0) : psi.value(l);
    mpq_class c = hecke_const(f, l);
    out.rankin_factor = ExactPoly({Cyclotomic(1, 1), x * mpq_class(-c)}) * out.symsq_factor;

    std::vector<Cyclotomic> series;
    for (int r = 0; r <= R; ++r) {
        mpz_class ar = f.prime_power(l, r);
        series.push_back(x.pow(r) * mpq_class(ar * ar));
    }
    ExactPoly lhs = out.rankin_factor * ExactPoly(series);
    ExactPoly rhs({Cyclotomic(1, 1), Cyclotomic(1, 0), x.pow(2) * mpq_class(-c * c)});
    out.product_matches = true;
    for (unsigned i = 0; i <= static_cast<unsigned>(R); ++i)
        if (lhs.coeff(i) != rhs.coeff(i)) out.product_matches = false;

    if (psi.is_trivial() && psi.exponent(l) >= 0 && f.eps(l) == 1) {
        out.quartic_applicable = true;
        mpq_class a = a_prime(f, l);
        ExactPoly lin = ExactPoly::from_integers({1, mpz_class(-c)});
        ExactPoly quad = ExactPoly::from_integers({1, mpz_class(-(a * a - 2 * c)), mpz_class(c * c)});
        out.quartic_matches = lin * lin * quad == out.rankin_factor;
    }
    return out;
}

std::vector<Cyclotomic> symsq_dirichlet_coeffs(const HeckeData& f, const DirichletCharacter& chi, long n_max) {
    if (n_max < 1) fail(ErrorKind::Domain, "n_max must be positive");
    const long ord = chi.order();
    std::vector<mpz_class> sq = square_index_coeffs(f, n_max);
    std::vector<std::vector<mpz_class>> acc(n_max + 1, std::vector<mpz_class>(ord, 0));
    const unsigned long twok2 = static_cast<unsigned long>(2 * f.weight - 2);
    for (long m = 1; m * m <= n_max; ++m) {
        long em = chi.exponent(m);
        if (em < 0 || eps_of(f, m) == 0) continue;
        mpz_class mpow = ipow(m, twok2);
        for (long r = 1; m * m * r <= n_max; ++r) {
            long er = chi.exponent(r);
            if (er < 0) continue;
            long e = (2 * em + er) % ord;
            mpz_addmul(acc[m * m * r][e].get_mpz_t(), mpow.get_mpz_t(), sq[r].get_mpz_t());
        }
    }
    std::vector<Cyclotomic> out;
    out.reserve(n_max + 1);
    out.emplace_back(ord, mpq_class(0));
    for (long n = 1; n <= n_max; ++n) {
        std::vector<mpq_class> co(acc[n].begin(), acc[n].end());
        out.push_back(Cyclotomic::from_coeffs(ord, co));
    }
    return out;
}

BallComplex L_direct(const SymSqDescriptor& desc, const BallComplex& s, long digits, long n_max) {
    const int k = desc.f.weight;
    double sigma = s.re().mid_d() - s.re().rad_d();
    if (!(sigma > k)) fail(ErrorKind::Domain, "direct summation needs Re(s) > k");
    if (!(sigma > k + 1))
        fail(ErrorKind::TailDominates, "tail bound needs Re(s) > k + 1; use the functional-equation method");
    PrecisionGuard guard(bits_for_digits(digits + 10) + 32);
    mpfr_prec_t prec = default_precision();
    const DirichletCharacter& chi = desc.chi;
    const long ord = chi.order();
    std::vector<mpz_class> sq = square_index_coeffs(desc.f, n_max);

    std::vector<BallComplex> partial(ord, BallComplex(0L, prec));
    BallComplex minus_s = -s;
    for (long n = 1; n <= n_max; ++n) {
        long e = chi.exponent(n);
        if (e < 0) continue;
        partial[e] += pow(BallReal(n, prec), minus_s) * BallReal(sq[n], prec);
    }
    BallComplex sum(0L, prec);
    for (long e = 0; e < ord; ++e) sum += partial[e] * embed_complex(Cyclotomic::zeta(ord, e), digits + 10);

    BallReal excess = BallReal::from_mid_rad(sigma - k - 1, 0, prec);
    BallReal tail = sqrt3_upper() * pow(BallReal(n_max, prec), -excess) / excess;
    sum.add_error(tail.abs_upper());

    std::vector<long> strip = prime_divisors(desc.f.level);
    BallComplex shifted = s * 2L - BallComplex(2L * k - 2, prec);
    BallComplex zeta_part = dirichlet_L_stripped(chi.pow(2), shifted, strip, digits + 10);
    BallComplex out = sum * zeta_part;

    double mag = abs(out).mid_d();
    double rel = tail.mid_d() / mag;
    if (rel > std::pow(10.0, -static_cast<double>(digits))) {
        std::ostringstream msg;
        msg << "tail bound " << tail.mid_d() << " allows about " << static_cast<long>(-std::log10(rel))
            << " digits at n_max = " << n_max;
        fail(ErrorKind::TailDominates, msg.str());
    }
    return out;
}

AfeConfig default_afe_config(const SymSqDescriptor& desc) {
    if (desc.f.level != 1) fail(ErrorKind::Domain, "default conductor is only known at level 1");
    const long k = desc.f.weight;
    AfeConfig cfg;
    cfg.mu = {desc.chi.parity() == 1 ? 1L : 0L, k - 1, k};
    long nc = desc.chi.conductor();
    cfg.conductor = nc * nc * nc;
    return cfg;
}

namespace {

// Values of Gamma_R(w + mu_1) ... Gamma_R(w + mu_d).
BallComplex gamma_factor(const BallComplex& w, const std::vector<long>& mu, const BallReal& pi) {
    mpfr_prec_t prec = w.prec();
    BallComplex out(1L, prec);
    for (long m : mu) {
        BallComplex x = w + BallComplex(m, prec);
        BallComplex half = x * BallReal(mpq_class(1, 2), prec);
        out *= pow(pi, -half) * gamma(half);
    }
    return out;
}

// Kernel nodes for Psi(z, x) = x^z / (2 pi i) int_{(c)} gamma(w) x^{-w} / (w - z) dw
// sampled at w_j = c + i j h; weights[j + J] = h gamma(w_j) / (2 pi (w_j - z)).
struct Kernel {
    BallComplex z;
    double c = 0;
    BallReal h;
    long J = 0;
    std::vector<BallComplex> weights;
    // Folded weights for the float inner loop: W_j u^j + W_{-j} conj(u^j)
    // = a P_j + b Q_j + i (a R_j + b S_j) with u^j = a + ib.
    std::vector<BallReal> P, Q, R, S;
    double abs0 = 0, abs1 = 0, rad_sum = 0;
    void fold();
};

void Kernel::fold() {
    mpfr_prec_t prec = weights[J].re().prec();
    P.assign(J + 1, BallReal(0L, prec));
    Q = R = S = P;
    abs0 = abs1 = rad_sum = 0;
    for (long j = 0; j <= J; ++j) {
        const BallComplex& wp = weights[J + j];
        const BallComplex& wm = weights[J - j];
        mpfr_srcptr p = wp.re().mid(), q = wp.im().mid(), r = wm.re().mid(), t = wm.im().mid();
        if (j == 0) {
            mpfr_set(P[0].mid_mut(), p, MPFR_RNDN);
            mpfr_neg(Q[0].mid_mut(), q, MPFR_RNDN);
            mpfr_set(R[0].mid_mut(), q, MPFR_RNDN);
            mpfr_set(S[0].mid_mut(), p, MPFR_RNDN);
        } else {
            mpfr_add(P[j].mid_mut(), p, r, MPFR_RNDN);
            mpfr_sub(Q[j].mid_mut(), t, q, MPFR_RNDN);
            mpfr_add(R[j].mid_mut(), q, t, MPFR_RNDN);
            mpfr_sub(S[j].mid_mut(), p, r, MPFR_RNDN);
        }
        double m = std::fabs(mpfr_get_d(p, MPFR_RNDU)) + std::fabs(mpfr_get_d(q, MPFR_RNDU));
        double rad = wp.re().rad_d() + wp.im().rad_d();
        if (j > 0) {
            m += std::fabs(mpfr_get_d(r, MPFR_RNDU)) + std::fabs(mpfr_get_d(t, MPFR_RNDU));
            rad += wm.re().rad_d() + wm.im().rad_d();
        }
        abs0 += m;
        abs1 += m * static_cast<double>(j);
        rad_sum += rad;
    }
}

Kernel build_kernel(const BallComplex& z, const std::vector<long>& mu, double offset, double target_log,
                    double x_min, double x_max, const BallReal& pi) {
    mpfr_prec_t prec = z.prec();
    Kernel K;
    K.z = z;
    K.c = std::floor(std::max(z.re().mid_d(), 0.0) + offset) + 0.5;
    // strip of analyticity: the pole at z and the rightmost pole of gamma
    long mu_min = *std::min_element(mu.begin(), mu.end());
    double d = 0.8 * std::min(K.c - z.re().mid_d(), K.c + static_cast<double>(mu_min));
    // the discretisation error is measured against the integrand on the shifted
    // line Re w = c + d, which can dwarf Psi itself for small x
    double spread = std::log(std::max({x_max, 1.0 / x_min, 1.0}));
    // scale of Psi; at a pole of gamma a nearby point stands in for it
    BallComplex gz;
    try {
        gz = gamma_factor(z, mu, pi);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Pole) throw;
        gz = gamma_factor(z + BallComplex(BallReal(mpq_class(1, 4), prec)), mu, pi);
    }
    BallComplex gshift = gamma_factor(BallComplex(BallReal::from_mid_rad(K.c + d, 0, prec)), mu, pi);
    double growth = std::max(0.0, log_abs(gshift) - log_abs(gz)) + (K.c + d - z.re().mid_d()) * spread;
    double hd = 2 * M_PI * d / (target_log + growth + 25.0);
    hd = std::min(hd, 0.25);
    hd = std::ldexp(std::floor(std::ldexp(hd, 12)), -12);
    K.h = BallReal::from_mid_rad(hd, 0, prec);
    BallReal c = BallReal::from_mid_rad(K.c, 0, prec);
    // |Psi| ~ |gamma(z)| near x_min; stop once the nodes fall below that by target_log.
    double floor_log = log_abs(gz) - target_log - 8.0 + (K.c - z.re().mid_d()) * std::log(x_min);
    BallReal scale = K.h / pi.mul_2exp(1);
    std::vector<BallComplex> pos, neg;
    int quiet = 0;
    for (long j = 0;; ++j) {
        if (j > 40000) fail(ErrorKind::NonConvergence, "kernel contour did not decay");
        BallComplex w(c, K.h * BallReal(j, prec));
        BallComplex g = gamma_factor(w, mu, pi) / (w - z) * scale;
        pos.push_back(g);
        if (j > 0) {
            BallComplex wn(c, -(K.h * BallReal(j, prec)));
            neg.push_back(gamma_factor(wn, mu, pi) / (wn - z) * scale);
        }
        double lg = log_abs(g);
        quiet = (j > 0 && lg < floor_log) ? quiet + 1 : 0;
        if (quiet >= 3) break;
    }
    K.J = static_cast<long>(pos.size()) - 1;
    K.weights.reserve(2 * K.J + 1);
    for (long j = K.J; j >= 1; --j) K.weights.push_back(neg[j - 1]);
    for (long j = 0; j <= K.J; ++j) K.weights.push_back(pos[j]);
    K.fold();
    return K;
}

// sum_j weights_j x^{-w_j}, i.e. Psi(z, x) without its x^z factor.
BallComplex kernel_sum(const Kernel& K, const BallReal& x) {
    mpfr_prec_t prec = x.prec();
    BallReal lx = log(x);
    BallComplex u = expi(-(K.h * lx));
    // Plain floating-point loop; rounding and the radius of u are bounded below.
    BallReal re(0L, prec), im(0L, prec), a(1L, prec), b(0L, prec), t1(0L, prec), t2(0L, prec);
    mpfr_srcptr ur = u.re().mid(), ui = u.im().mid();
    for (long j = 0; j <= K.J; ++j) {
        if (j > 0) {
            mpfr_mul(t1.mid_mut(), a.mid(), ur, MPFR_RNDN);
            mpfr_mul(t2.mid_mut(), b.mid(), ui, MPFR_RNDN);
            mpfr_mul(b.mid_mut(), b.mid(), ur, MPFR_RNDN);
            mpfr_fma(b.mid_mut(), a.mid(), ui, b.mid(), MPFR_RNDN);
            mpfr_sub(a.mid_mut(), t1.mid(), t2.mid(), MPFR_RNDN);
        }
        mpfr_fma(re.mid_mut(), a.mid(), K.P[j].mid(), re.mid(), MPFR_RNDN);
        mpfr_fma(re.mid_mut(), b.mid(), K.Q[j].mid(), re.mid(), MPFR_RNDN);
        mpfr_fma(im.mid_mut(), a.mid(), K.R[j].mid(), im.mid(), MPFR_RNDN);
        mpfr_fma(im.mid_mut(), b.mid(), K.S[j].mid(), im.mid(), MPFR_RNDN);
    }
    double eps = std::ldexp(1.0, -static_cast<int>(prec) + 1);
    double urad = u.re().rad_d() + u.im().rad_d();
    double err = K.abs1 * (urad + 8 * eps) * 1.01 + K.abs0 * 8 * eps * static_cast<double>(K.J + 2) + K.rad_sum;
    BallComplex acc(std::move(re), std::move(im));
    acc.add_error(BallReal::from_mid_rad(err, 0, prec));
    return acc * exp(-(BallReal::from_mid_rad(K.c, 0, prec) * lx));
}

double solve_x_cap(double target_log) {
    double x = 1.0;
    auto g = [&](double t) { return 3 * M_PI * std::pow(t, 2.0 / 3.0) - 12 * std::log(t + 1); };
    while (g(x) < target_log + 40) x *= 1.25;
    return x;
}

}  // namespace

namespace {

struct AfeSums {
    std::vector<BallComplex> S1, S2;
    BallComplex scale;  // A^s gamma(s)
    long used = 0;
};

// Shared data for one descriptor and configuration.
struct AfeSetup {
    const AfeConfig* cfg = nullptr;
    long k = 0;
    double target_log = 0;
    mpfr_prec_t prec = 0;
    BallReal pi, A;
    double t_min = 0, t_max = 0, x_cap = 0;
    long n_cap = 0;
    std::vector<bool> nonzero;
    std::vector<BallComplex> bn, bd;
};

AfeSetup afe_setup(const SymSqDescriptor& desc, const AfeConfig& cfg, long D) {
    AfeSetup S;
    S.cfg = &cfg;
    S.k = desc.f.weight;
    S.target_log = static_cast<double>(D) * std::log(10.0);
    S.prec = default_precision();
    S.pi = BallReal::pi(S.prec);
    S.A = sqrt(BallReal(cfg.conductor, S.prec));
    S.t_min = *std::min_element(cfg.t_values.begin(), cfg.t_values.end());
    S.t_max = *std::max_element(cfg.t_values.begin(), cfg.t_values.end());
    S.x_cap = solve_x_cap(S.target_log);
    S.n_cap = static_cast<long>(std::ceil(S.x_cap * S.A.mid_d() * std::max(1.0 / S.t_min, S.t_max))) + 1;
    if (S.n_cap > cfg.max_terms)
        fail(ErrorKind::ResourceLimit, "needs " + std::to_string(S.n_cap) + " coefficients, above max_terms");
    std::vector<Cyclotomic> b = symsq_dirichlet_coeffs(desc.f, desc.chi.primitive(), S.n_cap);
    S.nonzero.assign(S.n_cap + 1, false);
    S.bn.resize(S.n_cap + 1);
    S.bd.resize(S.n_cap + 1);
    for (long n = 1; n <= S.n_cap; ++n) {
        if (b[n].is_zero()) continue;
        S.nonzero[n] = true;
        BallReal norm_n = pow(BallReal(n, S.prec), S.k - 1);
        S.bn[n] = embed_complex(b[n], D + 10) / norm_n;
        S.bd[n] = embed_complex(b[n].conj(), D + 10) / norm_n;
    }
    return S;
}

// Lambda(sa) = S1(t) + sign * S2(t) for every smoothing parameter t.
AfeSums afe_sums(const AfeSetup& S, const BallComplex& sa) {
    const AfeConfig& cfg = *S.cfg;
    const mpfr_prec_t prec = S.prec;
    BallComplex sd = BallComplex(1L, prec) - sa;
    double Ad = S.A.mid_d();
    Kernel K1 = build_kernel(sa, cfg.mu, cfg.contour_offset, S.target_log, S.t_min / Ad, S.x_cap, S.pi);
    Kernel K2 = build_kernel(sd, cfg.mu, cfg.contour_offset, S.target_log, 1.0 / (Ad * S.t_max), S.x_cap, S.pi);

    AfeSums out;
    out.scale = pow(S.A, sa) * gamma_factor(sa, cfg.mu, S.pi);
    const double stop_log = log_abs(out.scale) - S.target_log - 4.0;

    auto side = [&](const Kernel& K, const std::vector<BallComplex>& coef, double t, bool dual) {
        BallReal tb = BallReal::from_mid_rad(t, 0, prec);
        BallComplex acc(0L, prec);
        int quiet = 0;
        for (long n = 1; n <= S.n_cap; ++n) {
            if (!S.nonzero[n]) continue;
            BallReal x = dual ? BallReal(n, prec) / (S.A * tb) : BallReal(n, prec) * tb / S.A;
            BallComplex term = coef[n] * kernel_sum(K, x);
            acc += term;
            out.used = std::max(out.used, n);
            bool small = log_abs(term) < stop_log;
            quiet = (small && x.mid_d() > 1.0) ? quiet + 1 : 0;
            if (quiet >= 6) break;
        }
        // (A/n)^z x^z collapses to t^z on the direct side and t^{-z} on the dual side
        return acc * (dual ? pow(tb, -K.z) : pow(tb, K.z));
    };
    for (double t : cfg.t_values) {
        out.S1.push_back(side(K1, S.bn, t, false));
        out.S2.push_back(side(K2, S.bd, t, true));
    }
    return out;
}

double max_disagreement(const AfeSums& s, const BallComplex& sign) {
    BallComplex lam0 = s.S1[0] + sign * s.S2[0];
    double m0 = abs(lam0).mid_d(), worst = 0;
    for (size_t i = 1; i < s.S1.size(); ++i)
        worst = std::max(worst, abs(s.S1[i] + sign * s.S2[i] - lam0).mid_d() / m0);
    return worst;
}

void check_residual(double residual, long digits, const char* where) {
    if (residual <= std::pow(10.0, -static_cast<double>(digits))) return;
    std::ostringstream msg;
    msg.precision(3);
    msg << "functional equation not satisfied " << where << ", relative residual " << residual;
    fail(ErrorKind::Inconsistency, msg.str());
}

}  // namespace

AfeResult L_afe_detailed(const SymSqDescriptor& desc, const AfeConfig& cfg, const BallComplex& s, long digits) {
    const long k = desc.f.weight;
    double sr = s.re().mid_d();
    if (!(sr > 0 && sr < 2 * k - 1)) fail(ErrorKind::Domain, "functional-equation evaluation needs 0 < Re(s) < 2k - 1");
    if (cfg.mu.empty() || cfg.conductor < 1) fail(ErrorKind::Domain, "gamma shifts and conductor are required");
    if (cfg.t_values.size() < 2 || (!cfg.sign && cfg.t_values.size() < 3))
        fail(ErrorKind::Domain, "need two smoothing parameters with a known sign, three otherwise");

    const long D = digits + 6;
    PrecisionGuard guard(bits_for_digits(D) + 96);
    mpfr_prec_t prec = default_precision();
    AfeSetup setup = afe_setup(desc, cfg, D);
    BallComplex sa = s - BallComplex(k - 1, prec);

    AfeResult out;
    double residual = 0;
    if (cfg.sign) {
        out.sign = *cfg.sign;
    } else {
        // Near the centre both sides have comparable size, so the sign is well conditioned there.
        BallComplex ref(BallReal(mpq_class(3, 5), prec), BallReal(mpq_class(2, 5), prec));
        AfeSums r = afe_sums(setup, ref);
        BallComplex den = r.S2[0] - r.S2[1];
        if (den.contains_zero())
            fail(ErrorKind::Inconsistency, "sign cannot be solved: dual sums agree at both parameters");
        out.sign = (r.S1[1] - r.S1[0]) / den;
        residual = std::max(std::abs(abs(out.sign).mid_d() - 1.0), max_disagreement(r, out.sign));
        check_residual(residual, digits, "at the reference point");
    }
    AfeSums main = afe_sums(setup, sa);
    double r_main = max_disagreement(main, out.sign);
    residual = std::max(residual, r_main);
    check_residual(r_main, digits, "at s");
    out.residual = residual;
    out.terms = main.used;

    BallComplex value = (main.S1[0] + out.sign * main.S2[0]) / main.scale;
    double mag = abs(value).mid_d();
    value.add_error(BallReal::from_mid_rad(mag * (10 * residual + std::pow(10.0, -static_cast<double>(D))), 0));

    // Euler factors at primes where chi is imprimitive
    DirichletCharacter prim = desc.chi.primitive();
    for (long l : prime_divisors(desc.chi.modulus())) {
        if (prim.modulus() % l == 0) continue;
        ExactPoly P = euler_factor_symsq(desc.f, prim, l);
        BallComplex X = pow(BallReal(l, prec), -s);
        BallComplex pv(0L, prec), xp(1L, prec);
        for (const Cyclotomic& co : P.coeffs()) {
            pv += embed_complex(co, D + 10) * xp;
            xp *= X;
        }
        value *= pv;
    }
    out.value = value;
    return out;
}

BallComplex L_afe(const SymSqDescriptor& desc, const AfeConfig& cfg, const BallComplex& s, long digits) {
    return L_afe_detailed(desc, cfg, s, digits).value;
}

namespace {

// Upper bound for sum_{n > m} sqrt(3n) n^{(k-1)/2} e^{-2 pi n y0}, valid once the
// ratio of consecutive terms stays below 1/2.
double q_tail_bound(int k, long m, double y0) {
    double n = static_cast<double>(m + 1);
    double ratio = std::exp(k / (2.0 * n) - 2 * M_PI * y0);
    if (ratio >= 0.5) return INFINITY;
    return 2.0 * std::sqrt(3.0) * std::pow(n, k / 2.0) * std::exp(-2 * M_PI * n * y0);
}

}  // namespace

BallReal petersson_norm(const QExpansion& f, long digits, QuadratureStats* stats) {
    if (f.level != 1) fail(ErrorKind::Domain, "Petersson norm is implemented for level 1");
    const int k = f.weight;
    if (k < 4) fail(ErrorKind::UnsupportedWeight, "weight must be at least 4");
    PrecisionGuard guard(bits_for_digits(digits + 8) + 32);
    mpfr_prec_t prec = default_precision();
    BallReal pi = BallReal::pi(prec);
    BallReal four_pi = pi.mul_2exp(2);

    // y >= 1: sum a_n^2 Gamma(k-1, 4 pi n) / (4 pi n)^{k-1}
    auto upper_gamma = [&](const BallReal& x) {
        // (a-1)! e^{-x} sum_{j<a} x^j / j!, a = k - 1
        BallReal term(1L, prec), sum(0L, prec);
        for (int j = 0; j < k - 1; ++j) {
            if (j > 0) term = term * x / BallReal(j, prec);
            sum += term;
        }
        return factorial(static_cast<unsigned long>(k - 2), prec) * exp(-x) * sum;
    };
    const double threshold = std::pow(10.0, -static_cast<double>(digits) - 6);
    BallReal first = upper_gamma(four_pi) / pow(four_pi, k - 1);
    BallReal rect(0L, prec);
    long m = 0;
    for (long n = 1;; ++n) {
        if (n > f.length())
            fail(ErrorKind::InsufficientCoefficients, "rectangle sum needs more than " + std::to_string(f.length()));
        BallReal x = four_pi * BallReal(n, prec);
        BallReal an(f[n], prec);
        rect += sqr(an) * upper_gamma(x) / pow(x, k - 1);
        m = n;
        if (n >= k) {
            double nn = static_cast<double>(n + 1);
            double bound = 2.0 * 3.0 * std::pow(nn, k) * std::exp(-4 * M_PI * nn) / (4 * M_PI * nn) /
                           (1.0 - (k - 2) / (4 * M_PI * nn));
            if (bound < threshold * first.mid_d()) {
                rect.add_error(bound);
                break;
            }
        }
    }
    (void)m;

    // q-expansion truncation on y >= sqrt(3)/2
    const double y0 = std::sqrt(3.0) / 2.0 - 1e-9;
    long nq = 1;
    while (!(q_tail_bound(k, nq, y0) < threshold * 1e-3)) {
        ++nq;
        if (nq > f.length())
            fail(ErrorKind::InsufficientCoefficients,
                 "q-expansion truncation needs more than " + std::to_string(f.length()) + " coefficients");
    }
    const double q_err = q_tail_bound(k, nq, y0);
    std::vector<BallReal> coeffs;
    for (long n = 1; n <= nq; ++n) coeffs.emplace_back(f[n], prec);

    BallReal two_pi = pi.mul_2exp(1);
    Integrand2d integrand = [&](const BallReal& x, const BallReal& y) {
        BallComplex q = expi(two_pi * x) * exp(-(two_pi * y));
        BallComplex qn = q, val(0L, prec);
        for (long n = 1; n <= nq; ++n) {
            val += qn * coeffs[n - 1];
            qn *= q;
        }
        val.add_error(BallReal::from_mid_rad(q_err, 0));
        return norm(val) * pow(y, k - 2);
    };
    FundamentalRegion region;
    region.y_cut = 1.0;
    region.x_lo = 0.0;
    region.x_hi = 0.5;
    BallReal tol = BallReal::from_mid_rad(first.mid_d() * threshold * 1e3, 0);
    BallReal lower = integrate_2d(integrand, region, tol, BallReal(0L), stats);
    return rect + lower.mul_2exp(1);
}

BallReal symsq_value_from_petersson(int k, const BallReal& petersson) {
    mpfr_prec_t prec = petersson.prec();
    BallReal pi = BallReal::pi(prec);
    return BallReal(1L, prec).mul_2exp(2 * k - 1) * pow(pi, k + 1) /
           factorial(static_cast<unsigned long>(k - 1), prec) * petersson;
}

Criticality criticality(int k, int chi_parity, long s) {
    bool even = s % 2 == 0;
    int sign = even ? 1 : -1;
    if (s >= 1 && s <= k - 1 && sign == -chi_parity) return {true, 0};
    if (s >= k && s <= 2 * k - 2 && sign == chi_parity) return {true, 1};
    return {false, 0};
}

BallComplex schmidt_ratio(const SymSqDescriptor& desc, long s, const BallComplex& L, const BallReal& petersson) {
    const int k = desc.f.weight;
    Criticality cr = criticality(k, desc.chi.parity(), s);
    if (!cr.critical) fail(ErrorKind::NonCritical, "s = " + std::to_string(s) + " is not critical");
    mpfr_prec_t prec = std::max(L.prec(), petersson.prec());
    BallReal pi = BallReal::pi(prec);
    long digits = static_cast<long>(prec / 3.33) + 5;
    BallComplex G = embed_complex(gauss_sum(desc.chi.conj()), digits);
    BallComplex two_pi_i(BallReal(0L, prec), pi.mul_2exp(1));
    BallComplex factor = G / pow(two_pi_i, s - k + 1);
    if (cr.delta == 1) factor *= factor;
    return L / (pow(pi, k - 1) * petersson) * factor;
}

BallComplex tilde_ratio(int k, const DirichletCharacter& psi, long s, const BallComplex& L, const BallReal& petersson) {
    Criticality cr = criticality(k, psi.parity(), s);
    if (!cr.critical || cr.delta != 1)
        fail(ErrorKind::NonCritical, "s = " + std::to_string(s) + " is not a critical point with s >= k");
    mpfr_prec_t prec = std::max(L.prec(), petersson.prec());
    BallReal pi = BallReal::pi(prec);
    long digits = static_cast<long>(prec / 3.33) + 5;
    BallComplex G = embed_complex(gauss_sum(psi.conj()), digits);
    BallReal num = factorial(static_cast<unsigned long>(s - 1), prec) * factorial(static_cast<unsigned long>(s - k), prec);
    BallReal den = BallReal(1L, prec).mul_2exp(2 * s + 1) * pow(pi, 2 * s - k + 1) * petersson;
    return G * G * L * (num / den);
}

TildeResult tilde_ratio_w16(long s, const TildeOptions& opt) {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    Criticality cr = criticality(16, psi.parity(), s);
    if (!cr.critical || cr.delta != 1) fail(ErrorKind::NonCritical, "s = " + std::to_string(s) + " is not critical");
    long n = std::max(opt.n_max, 200L);
    QExpansion F = level1_eigenform(16, n);
    SymSqDescriptor desc = make_descriptor(hecke_data(F), psi);
    PrecisionGuard guard(bits_for_digits(opt.digits + 8) + 32);
    TildeResult out;
    out.petersson = petersson_norm(F, opt.digits + 2);
    BallComplex sb(s, default_precision());
    try {
        out.L = L_direct(desc, sb, opt.digits + 2, opt.n_max);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::TailDominates) throw;
        out.L = L_afe(desc, default_afe_config(desc), sb, opt.digits + 2);
    }
    out.ratio = tilde_ratio(16, psi, s, out.L, out.petersson);
    return out;
}

std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> B) {
    const size_t n = B.size();
    if (n == 0) return B;
    const size_t dim = B[0].size();
    std::vector<std::vector<mpq_class>> mu(n, std::vector<mpq_class>(n, 0));
    std::vector<mpq_class> bnorm(n, 0);
    auto dot = [&](const std::vector<mpq_class>& a, const std::vector<mpq_class>& b) {
        mpq_class r = 0;
        for (size_t i = 0; i < dim; ++i) r += a[i] * b[i];
        return r;
    };
    auto gram_schmidt = [&]() {
        std::vector<std::vector<mpq_class>> star(n, std::vector<mpq_class>(dim));
        for (size_t i = 0; i < n; ++i) {
            for (size_t t = 0; t < dim; ++t) star[i][t] = B[i][t];
            std::vector<mpq_class> bi = star[i];
            for (size_t j = 0; j < i; ++j) {
                mu[i][j] = bnorm[j] == 0 ? mpq_class(0) : dot(bi, star[j]) / bnorm[j];
                for (size_t t = 0; t < dim; ++t) star[i][t] -= mu[i][j] * star[j][t];
            }
            bnorm[i] = dot(star[i], star[i]);
        }
    };
    gram_schmidt();
    size_t kk = 1;
    const mpq_class delta(3, 4);
    while (kk < n) {
        for (size_t j = kk; j-- > 0;) {
            mpq_class m = mu[kk][j];
            // nearest integer
            mpz_class q = (2 * m.get_num() + m.get_den());
            mpz_fdiv_q(q.get_mpz_t(), q.get_mpz_t(), mpz_class(2 * m.get_den()).get_mpz_t());
            if (q != 0) {
                for (size_t t = 0; t < dim; ++t) B[kk][t] -= q * B[j][t];
                gram_schmidt();
            }
        }
        if (bnorm[kk] >= (delta - mu[kk][kk - 1] * mu[kk][kk - 1]) * bnorm[kk - 1]) {
            ++kk;
        } else {
            std::swap(B[kk], B[kk - 1]);
            gram_schmidt();
            kk = std::max<size_t>(kk - 1, 1);
        }
    }
    return B;
}

std::optional<QuadraticNumber> recognize_quadratic(const BallComplex& z, long d, const mpz_class& H) {
    if (d == 0 || d == 1 || !is_squarefree(d)) fail(ErrorKind::Domain, "d must be square-free and not 0 or 1");
    mpfr_prec_t prec = z.prec();
    double rad = z.radius().mid_d();
    long bits = rad > 0 ? static_cast<long>(std::floor(-std::log2(rad))) - 4 : static_cast<long>(prec) - 8;
    bits = std::min<long>(bits, static_cast<long>(prec) - 8);
    // a relation of height H is only meaningful when the scale exceeds H^2
    long hbits = static_cast<long>(mpz_sizeinbase(H.get_mpz_t(), 2));
    if (bits < 2 * hbits + 4) return std::nullopt;

    PrecisionGuard guard(prec + 16);
    BallReal root = sqrt(BallReal(d < 0 ? -d : d, prec + 16));
    BallReal rre = d < 0 ? BallReal(0L, prec + 16) : root;
    BallReal rim = d < 0 ? root : BallReal(0L, prec + 16);
    auto scaled = [&](const BallReal& x) {
        BallReal y = x.mul_2exp(bits);
        mpfr_t tmp;
        mpfr_init2(tmp, y.prec());
        mpfr_round(tmp, y.mid());
        mpz_class out;
        mpfr_get_z(out.get_mpz_t(), tmp, MPFR_RNDN);
        mpfr_clear(tmp);
        return out;
    };
    mpz_class W = 1;
    W <<= bits;
    std::vector<std::vector<mpz_class>> basis{
        {1, 0, 0, scaled(z.re()), scaled(z.im())},
        {0, 1, 0, -W, 0},
        {0, 0, 1, -scaled(rre), -scaled(rim)},
    };
    auto reduced = lll_reduce(basis);
    double tol = 10 * rad + std::ldexp(1.0, -static_cast<int>(prec) + 8);
    for (const auto& row : reduced) {
        mpz_class c = row[0], a = row[1], b = row[2];
        if (c == 0) continue;
        if (c < 0) {
            c = -c;
            a = -a;
            b = -b;
        }
        if (c > H || abs(a) > H || abs(b) > H) continue;
        mpq_class qa(a, c), qb(b, c);
        qa.canonicalize();
        qb.canonicalize();
        QuadraticNumber cand(d, qa, qb);
        BallComplex e = embed_complex(cand, static_cast<long>(prec / 3.3) + 5);
        BallComplex diff = e - z;
        if (diff.re().abs_lower().mid_d() <= tol && diff.im().abs_lower().mid_d() <= tol) return cand;
    }
    return std::nullopt;
}

OrdinaryRoots ordinary_roots(const mpz_class& a_p, long p, int k, long precision) {
    mpz_class pz = p;
    if (mpz_divisible_ui_p(a_p.get_mpz_t(), static_cast<unsigned long>(p)))
        fail(ErrorKind::NonOrdinary, "p divides a_p at p = " + std::to_string(p));
    mpz_class pk = ipow(p, static_cast<unsigned long>(k - 1));
    ExactPoly hecke = ExactPoly::from_integers({pk, -a_p, 1});
    mpz_class r0 = a_p % pz;
    if (r0 < 0) r0 += pz;
    OrdinaryRoots out;
    out.alpha = hensel_root(hecke, pz, r0, precision);
    out.beta = PadicNumber::from_rational(pz, mpq_class(pk), precision) * out.alpha.inverse();
    return out;
}

InterpMultiplier interp_multiplier(MultiplierKind kind, long s, long r, int k, long p, const OrdinaryRoots& roots,
                                   const Cyclotomic& psi_p, const Cyclotomic& eps_p, const CyclotomicEmbedder& embed) {
    if (roots.alpha.is_zero() || roots.alpha.valuation() != 0)
        fail(ErrorKind::NonOrdinary, "alpha_p is not a p-adic unit");
    if (r < 0) fail(ErrorKind::Domain, "conductor exponent must be non-negative");
    mpz_class pz = p;
    long K = roots.alpha.relative_precision();
    auto rat = [&](const mpq_class& q) { return PadicNumber::from_rational(pz, q, K); };
    PadicNumber one = rat(1);
    PadicNumber psi = embed(psi_p), eps = embed(eps_p);
    PadicNumber a2inv = (roots.alpha * roots.alpha).inverse();
    InterpMultiplier out;
    out.kind = kind;
    out.s = s;
    out.conductor_exponent = r;
    if (r >= 1) {
        PadicNumber base = rat(qpow(p, s - 1)) * psi.inverse() * a2inv;
        if (kind == MultiplierKind::EPrime) base = base * psi.inverse() * eps.inverse();
        out.value = base.pow(r);
        out.vanishes = false;
        return out;
    }
    PadicNumber f1 = one - rat(qpow(p, s - 1)) * psi.inverse() * a2inv;
    PadicNumber f3 = one - psi * roots.beta * roots.beta * rat(qpow(p, -s));
    // middle factor in exact form: alpha beta = p^{k-1} eps(p)
    Cyclotomic pe = psi_p * eps_p;
    long e = kind == MultiplierKind::E ? k - 1 - s : s - k;
    Cyclotomic unit = kind == MultiplierKind::E ? pe : pe.inverse();
    PadicNumber f2 = PadicNumber::exact_zero(pz);
    if (!(e == 0 && unit == Cyclotomic(1, 1))) f2 = one - embed(unit) * rat(qpow(p, e));
    out.value = f1 * f2 * f3;
    out.vanishes = out.value.is_exact_zero();
    return out;
}

PadicLValue padic_symsq_L_value(long s, const QuadraticNumber& ratio, const PadicEmbedding& emb, int k,
                                const mpz_class& a_p, const DirichletCharacter& psi) {
    long p = emb.p.get_si();
    OrdinaryRoots roots = ordinary_roots(a_p, p, k, emb.precision);
    CyclotomicEmbedder embed = [&](const Cyclotomic& x) { return embed_cyclotomic(x, emb); };
    InterpMultiplier m = interp_multiplier(MultiplierKind::EPrime, s, 0, k, p, roots, psi.value(p),
                                           Cyclotomic(1, 1), embed);
    PadicLValue out;
    out.multiplier = m.value;
    out.ratio = embed_quadratic(ratio, emb);
    out.value = out.multiplier * out.ratio;
    out.valuation = out.value.valuation();
    out.unit = out.value.is_unit();
    return out;
}

Cyclotomic reciprocity_multiplier(long s, long c, const DirichletCharacter& psi, const DirichletCharacter& eps, int k,
                                  const DirichletCharacter& chi) {
    if (c <= 1) fail(ErrorKind::Domain, "c must exceed 1");
    if (psi.exponent(c) < 0 || eps.exponent(c) < 0 || chi.exponent(c) < 0)
        fail(ErrorKind::Domain, "c must be coprime to the character moduli");
    Cyclotomic pe = psi.value(c) * eps.value(c);
    Cyclotomic inner = Cyclotomic(1, mpq_class(c) * c) - chi.value(c).pow(2) * pe.pow(2).inverse() * qpow(c, 2 * s - 2 * k + 2);
    Cyclotomic g1 = gauss_sum(psi.conj()), g2 = gauss_sum(eps.conj());
    Cyclotomic out = inner * g1 * g1 * g2 * g2;
    return s % 2 == 0 ? out : -out;
}

}  // namespace symsq
