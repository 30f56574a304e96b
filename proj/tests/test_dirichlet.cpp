#include <doctest.h>

#include <mpfr.h>

#include <numeric>
#include <set>

#include "symsq/dirichlet.hpp"
#include "symsq/error.hpp"

using namespace symsq;

namespace {

long euler_phi_naive(long n) {
    long c = 0;
    for (long a = 1; a <= n; ++a) c += std::gcd(a, n) == 1;
    return c;
}

int legendre(long a, long p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    long r = 1, b = a, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r == 1 ? 1 : -1;
}

BallReal mpfr_zeta_ball(unsigned long s, mpfr_prec_t prec) {
    BallReal out(0L, prec);
    mpfr_zeta_ui(out.mid_mut(), s, MPFR_RNDN);
    mpfr_set_ui_2exp(out.rad_mut(), 1, -static_cast<long>(prec) + 4, MPFR_RNDU);
    return out;
}

}  // namespace

TEST_SUITE("dirichlet") {

TEST_CASE("the order-3 character mod 7") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    CHECK(psi.order() == 3);
    CHECK(psi.conductor() == 7);
    CHECK(psi.parity() == 1);
    CHECK(psi.value(3) == Cyclotomic::zeta(3));
    CHECK(psi.value(2) == Cyclotomic::zeta(3, 2));
    CHECK(DirichletCharacter::from_generator_value(7, 3, 1, 3) == psi);
    CHECK((psi * psi).label() == "7.4");
    CHECK(psi.conj() == psi.pow(2));
    CHECK_THROWS_AS(DirichletCharacter::parse("7x2"), Error);
    CHECK_THROWS_AS(DirichletCharacter::parse("7.7"), Error);
}

TEST_CASE("character group structure for small moduli") {
    for (long n = 1; n <= 48; ++n) {
        std::set<std::vector<long>> tables;
        for (long i = 1; i <= n; ++i) {
            if (std::gcd(i, n) != 1) continue;
            DirichletCharacter chi = DirichletCharacter::conrey(n, i);
            std::vector<long> t;
            for (long a = 0; a < n; ++a) t.push_back(chi.exponent(a) < 0 ? -1 : chi.exponent(a) * (1000 / chi.order()));
            tables.insert(t);
            // complete multiplicativity and vanishing off units
            for (long a = 0; a < n; ++a)
                for (long b = 0; b < n; ++b) {
                    long ea = chi.exponent(a), eb = chi.exponent(b), eab = chi.exponent(a * b);
                    if (ea < 0 || eb < 0) CHECK(eab < 0);
                    else CHECK(eab == (ea + eb) % chi.order());
                    if (std::gcd(a, n) != 1 && n > 1) CHECK(ea < 0);
                }
            // orthogonality
            Cyclotomic sum(1, 0);
            for (long a = 0; a < n; ++a) sum += chi.value(a);
            if (chi.is_trivial()) CHECK(sum == Cyclotomic(1, euler_phi_naive(n)));
            else CHECK(sum.is_zero());
            // induction from the conductor
            DirichletCharacter prim = chi.primitive();
            CHECK(prim.is_primitive());
            CHECK(n % prim.modulus() == 0);
            for (long a = 0; a < n; ++a)
                if (std::gcd(a, n) == 1) CHECK(prim.value(a) == chi.value(a));
        }
        CHECK(static_cast<long>(tables.size()) == euler_phi_naive(n));
    }
    CHECK(DirichletCharacter::conrey(8, 7).conductor() == 4);
    CHECK(DirichletCharacter::conrey(8, 3).conductor() == 8);
    CHECK(DirichletCharacter::conrey(8, 5).conductor() == 8);
}

TEST_CASE("quadratic characters are Legendre symbols") {
    for (long p : {3, 5, 7, 11, 13, 101}) {
        DirichletCharacter chi = DirichletCharacter::conrey(p, p - 1);
        for (long a = 0; a < p; ++a) CHECK(chi.value(a) == Cyclotomic(1, legendre(a, p)));
    }
}

TEST_CASE("Gauss sums") {
    CHECK(gauss_sum(DirichletCharacter::trivial(1)) == Cyclotomic(1, 1));
    CHECK(gauss_sum(DirichletCharacter::trivial(12)) == Cyclotomic(1, 1));
    CHECK(gauss_sum(DirichletCharacter::conrey(5, 4)) == sqrt_as_cyclotomic(5));
    Cyclotomic g = gauss_sum(DirichletCharacter::parse("7.2"));
    CHECK(g * g.conj() == Cyclotomic(1, 7));
    BallComplex e = embed_complex(g, 30);
    CHECK(norm(e).contains(mpq_class(7)));
    for (long n = 3; n <= 30; ++n)
        for (long i = 1; i < n; ++i) {
            if (std::gcd(i, n) != 1) continue;
            DirichletCharacter chi = DirichletCharacter::conrey(n, i);
            if (!chi.is_primitive()) continue;
            CHECK(gauss_sum(chi) * gauss_sum(chi.conj()) == Cyclotomic(1, chi.parity() * n));
        }
}

TEST_CASE("generalised Bernoulli numbers") {
    DirichletCharacter one = DirichletCharacter::trivial(1);
    CHECK(gen_bernoulli(1, one) == Cyclotomic(1, mpq_class(1, 2)));
    CHECK(gen_bernoulli(2, one) == Cyclotomic(1, mpq_class(1, 6)));
    CHECK(gen_bernoulli(12, one) == Cyclotomic(1, mpq_class(-691, 2730)));
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    CHECK(gen_bernoulli(3, psi).is_zero());
    CHECK(gen_bernoulli(5, psi).is_zero());
    // B_{1,chi} = (1/N) sum chi(a) a for nontrivial chi
    for (long n : {5, 7, 8, 12}) {
        for (long i = 1; i < n; ++i) {
            if (std::gcd(i, n) != 1) continue;
            DirichletCharacter chi = DirichletCharacter::conrey(n, i);
            if (chi.is_trivial()) continue;
            Cyclotomic direct(1, 0);
            for (long a = 1; a < n; ++a) direct += chi.value(a) * mpq_class(a, n);
            CHECK(gen_bernoulli(1, chi) == direct);
        }
    }
    // against the defining sum with Bernoulli polynomials
    for (unsigned k = 2; k <= 14; ++k) {
        Cyclotomic direct(1, 0);
        mpz_class nk;
        mpz_ui_pow_ui(nk.get_mpz_t(), 7, k - 1);
        for (long a = 1; a <= 7; ++a) direct += psi.value(a) * mpq_class(nk * bernoulli_polynomial(k, mpq_class(a, 7)));
        CHECK(gen_bernoulli(k, psi) == direct);
    }
    CHECK(bernoulli_polynomial(2, mpq_class(1, 3)) == mpq_class(1, 9) - mpq_class(1, 3) + mpq_class(1, 6));
}

TEST_CASE("Hurwitz zeta and stripped L-values") {
    PrecisionGuard g(200);
    BallReal pi = BallReal::pi(200);
    BallComplex z2 = dirichlet_L_stripped(DirichletCharacter::trivial(1), 2, {}, 40);
    CHECK(z2.re().overlaps(sqr(pi) / BallReal(6)));
    CHECK(z2.re().rad_d() < 1e-38);
    BallComplex z2s = dirichlet_L_stripped(DirichletCharacter::trivial(1), 2, {2}, 40);
    CHECK(z2s.re().overlaps(sqr(pi) / BallReal(8)));
    // zeta(3, 1/2) = 7 zeta(3)
    BallComplex h = hurwitz_zeta(BallComplex(3L, 200), BallReal(mpq_class(1, 2)), 40);
    CHECK(h.re().overlaps(mpfr_zeta_ball(3, 200) * BallReal(7)));
    // Catalan's constant
    BallComplex cat = dirichlet_L_stripped(DirichletCharacter::conrey(4, 3), 2, {}, 35);
    CHECK(cat.re().overlaps(BallReal::from_string("0.9159655941772190150546035149323841107741493742816721342664981196")));
    CHECK(cat.im().contains_zero());
    // psi^2 at 14 against 1000 terms of the series (tail < 1e-38)
    DirichletCharacter psi2 = DirichletCharacter::parse("7.4");
    BallComplex l = dirichlet_L_stripped(psi2, 14, {7}, 30);
    BallComplex direct(0L, 200);
    for (long n = 1; n <= 1000; ++n) {
        if (n % 7 == 0) continue;
        direct += embed_complex(psi2.value(n), 45) * pow(BallReal(n, 200), -14);
    }
    direct.add_error(BallReal::from_mid_rad(1e-38, 0));
    CHECK(l.overlaps(direct));
    CHECK(l.radius().mid_d() < 1e-29);
    // complex s: zeta(s, 1/2) = (2^s - 1) zeta(s)
    BallComplex s(BallReal(mpq_class(5, 2)), BallReal(3));
    BallComplex lhs = hurwitz_zeta(s, BallReal(mpq_class(1, 2)), 30);
    BallComplex rhs = (pow(BallReal(2), s) - BallComplex(1)) * hurwitz_zeta(s, BallReal(1), 30);
    CHECK(lhs.overlaps(rhs));
    CHECK_THROWS_AS(dirichlet_L_stripped(DirichletCharacter::trivial(1), 1, {}, 10), Error);
}

TEST_CASE("Kubota-Leopoldt values") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    PadicEmbedding e37 = make_embedding(-3, 37, 5, -2, 8);
    KLValue v = kl_padic_value(psi, -29, e37);
    CHECK(v.exact_point);
    CHECK(v.value.valuation() == 0);
    CHECK(v.value.digit(0) == 12);
    CHECK(v.value.digit(1) == 36);
    CHECK(v.value.digit(2) == 23);
    KLValue w = kl_padic_value(psi, 7, e37);
    CHECK_FALSE(w.exact_point);
    CHECK(w.valid_exponent == 1);
    CHECK(w.indices == std::vector<long>{30});
    CHECK(w.value.equals_mod(v.value, 1));

    PadicEmbedding e439 = make_embedding(-3, 439, 14, 9, 6);
    KLValue u = kl_padic_value(psi, 7, e439, 3);
    CHECK(u.valid_exponent == 3);
    CHECK(u.indices == std::vector<long>{432, 870, 1308});
    CHECK(u.value.valuation() == 1);
    CHECK(u.value.digit(1) == 148);
    CHECK(u.value.digit(2) == 232);

    CHECK_THROWS_AS(kl_padic_value(psi, -30, e37), Error);
    DirichletCharacter odd = DirichletCharacter::conrey(7, 3);
    try {
        kl_padic_value(DirichletCharacter::conrey(37, 2), -3, e37);
        FAIL("expected a ramified error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Ramified);
    }
    (void)odd;
    // root-of-unity route agrees with the quadratic route
    RootOfUnityEmbedding r37 = root_embedding_from_quadratic(e37, 3);
    CHECK(kl_padic_value(psi, -29, r37).value.equals_mod(v.value, 8));
}

TEST_CASE("regular primes") {
    CHECK(is_regular_prime(5).regular);
    CHECK(is_regular_prime(7).regular);
    RegularityResult r37 = is_regular_prime(37);
    CHECK_FALSE(r37.regular);
    CHECK(r37.irregular_indices == std::vector<long>{32});
    // exact Bernoulli numerators as the oracle
    for (long p = 3; p < 240; p += 2) {
        if (!is_probable_prime(mpz_class(p))) continue;
        std::vector<long> expect;
        for (long k = 2; k <= p - 3; k += 2)
            if (mpz_divisible_ui_p(bernoulli_number(static_cast<unsigned>(k)).get_num_mpz_t(), p)) expect.push_back(k);
        CHECK(is_regular_prime(p).irregular_indices == expect);
    }
    CHECK_THROWS_AS(is_regular_prime(9), Error);
}

}  // TEST_SUITE
