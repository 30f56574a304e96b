#include <doctest.h>

#include <random>

#include "symsq/error.hpp"
#include "symsq/exact.hpp"

using namespace symsq;

namespace {

Cyclotomic random_cyclotomic(long n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(-9, 9);
    std::vector<mpq_class> c;
    for (long i = 0; i < n + 2; ++i) c.emplace_back(d(rng), 1 + std::abs(d(rng)));
    for (auto& q : c) q.canonicalize();
    return Cyclotomic::from_coeffs(n, c);
}

// trial-division oracle
std::vector<std::pair<unsigned long, unsigned>> trial_factor(unsigned long n) {
    std::vector<std::pair<unsigned long, unsigned>> out;
    for (unsigned long p = 2; p * p <= n; ++p) {
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e) out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

const char* kNumA = "136547867422656337144320";
const char* kNumB = "102994007489228654461440";
const char* kDen = "17433892055631543710491";

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("Bernoulli numbers") {
    CHECK(bernoulli_number(0) == 1);
    CHECK(bernoulli_number(1) == mpq_class(-1, 2));
    CHECK(bernoulli_number(2) == mpq_class(1, 6));
    CHECK(bernoulli_number(3) == 0);
    CHECK(bernoulli_number(4) == mpq_class(-1, 30));
    CHECK(bernoulli_number(12) == mpq_class(-691, 2730));
    CHECK(bernoulli_number(30) == mpq_class(mpz_class("8615841276005"), 14322));
    // recurrence oracle: sum_{j<m} binom(m+1, j) B_j = -(m+1) B_m ... i.e. sum_{j<=m} binom(m+1,j) B_j = 0
    for (unsigned m = 1; m <= 80; ++m) {
        mpq_class s = 0;
        mpz_class binom = 1;
        for (unsigned j = 0; j <= m; ++j) {
            s += binom * bernoulli_number(j);
            binom = binom * (m + 1 - j) / (j + 1);
        }
        CHECK(s == 0);
    }
}

TEST_CASE("cyclotomic polynomials") {
    CHECK(cyclotomic_polynomial(1) == std::vector<mpz_class>{-1, 1});
    CHECK(cyclotomic_polynomial(3) == std::vector<mpz_class>{1, 1, 1});
    CHECK(cyclotomic_polynomial(12) == std::vector<mpz_class>{1, 0, -1, 0, 1});
    CHECK(cyclotomic_polynomial(21).size() == 13);
}

TEST_CASE("cyclotomic ring axioms") {
    std::mt19937_64 rng(3);
    for (long n : {1, 3, 4, 7, 12}) {
        for (int t = 0; t < 20; ++t) {
            Cyclotomic a = random_cyclotomic(n, rng), b = random_cyclotomic(n, rng), c = random_cyclotomic(n, rng);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a * b == b * a);
            if (!a.is_zero()) CHECK(a * a.inverse() == Cyclotomic(n, 1));
        }
    }
}

TEST_CASE("reduction is canonical") {
    Cyclotomic z = Cyclotomic::zeta(3);
    CHECK(z * z * z == Cyclotomic(3, 1));
    CHECK(z * z == -(z + Cyclotomic(3, 1)));
    CHECK(Cyclotomic::zeta(6, 2) == z);
    CHECK(Cyclotomic::zeta(2) == Cyclotomic(1, -1));
}

TEST_CASE("trace and norm") {
    CHECK(Cyclotomic::zeta(7).trace() == -1);
    CHECK(Cyclotomic(7, 3).trace() == 18);
    CHECK((Cyclotomic(7, 1) - Cyclotomic::zeta(7)).norm() == 7);
    CHECK((Cyclotomic(9, 1) - Cyclotomic::zeta(9)).norm() == 3);
}

TEST_CASE("embed_complex") {
    BallComplex z3 = embed_complex(Cyclotomic::zeta(3), 20);
    CHECK(z3.re().contains(mpq_class(-1, 2)));
    BallReal half_root3 = sqrt(BallReal(3L, 200)).mul_2exp(-1);
    CHECK(z3.im().overlaps(half_root3));
    CHECK(z3.radius().mid_d() < 1e-20);
    BallComplex one = embed_complex(Cyclotomic(5, 1), 20);
    CHECK(one.re().contains(mpq_class(1)));
    CHECK(one.im().contains(mpq_class(0)));
}

TEST_CASE("embed_complex is a ring homomorphism") {
    std::mt19937_64 rng(5);
    for (long n : {3, 4, 7, 12}) {
        for (int t = 0; t < 10; ++t) {
            Cyclotomic a = random_cyclotomic(n, rng), b = random_cyclotomic(n, rng);
            BallComplex ea = embed_complex(a, 30), eb = embed_complex(b, 30);
            CHECK((ea * eb).overlaps(embed_complex(a * b, 30)));
            CHECK((ea + eb).overlaps(embed_complex(a + b, 30)));
        }
    }
}

TEST_CASE("quadratic numbers") {
    Cyclotomic s = sqrt_as_cyclotomic(-3);
    CHECK(s == Cyclotomic(3, 1) + Cyclotomic::zeta(3) * mpq_class(2));
    CHECK(sqrt_as_cyclotomic(5) * sqrt_as_cyclotomic(5) == Cyclotomic(1, 5));
    CHECK(sqrt_as_cyclotomic(2) * sqrt_as_cyclotomic(2) == Cyclotomic(1, 2));
    QuadraticNumber x(-3, mpq_class(3, 7), mpq_class(2, 7));
    CHECK(QuadraticNumber::from_cyclotomic(x.to_cyclotomic(), -3) == x);
    CHECK(x * x.inverse() == QuadraticNumber(-3, 1, 0));
    CHECK((x * x.conj()).b() == 0);
    CHECK_THROWS_AS(QuadraticNumber(4, 1, 1), Error);
    CHECK_THROWS_AS(QuadraticNumber::from_cyclotomic(Cyclotomic::zeta(7), -3), Error);
    // principal branch: sqrt(-3) has positive imaginary part
    BallComplex e = embed_complex(s, 20);
    CHECK(e.im().is_positive());
}

TEST_CASE("embedding of the weight-16 ratio") {
    QuadraticNumber r(-3, mpq_class(mpz_class(kNumA), mpz_class(kDen)), mpq_class(mpz_class(kNumB), mpz_class(kDen)));
    BallComplex z = embed_complex(r, 30);
    CHECK(z.re().mid_string(5) == "7.8323e+00");
    CHECK(z.im().mid_string(6) == "1.02324e+01");
    CHECK(z.radius().mid_d() < 1e-29);
    // cyclotomic path gives the same ball
    BallComplex zc = embed_complex(r.to_cyclotomic(), 30);
    CHECK(zc.overlaps(z));
}

TEST_CASE("factor_integer basics") {
    CHECK(factor_integer(1).empty());
    auto f = factor_integer(mpz_class(360));
    REQUIRE(f.size() == 3);
    CHECK(f[0].prime == 2);
    CHECK(f[0].exponent == 3);
    CHECK(f[2].prime == 5);
    auto big = factor_integer(mpz_class("1000000016000000063"));  // (1e9+7)(1e9+9)
    REQUIRE(big.size() == 2);
    CHECK(big[0].prime == 1000000007);
    CHECK(big[1].prime == 1000000009);
}

TEST_CASE("factor_integer: ratio denominator and numerator norm") {
    auto den = factor_integer(mpz_class(kDen));
    for (const auto& pf : den) CHECK((pf.prime == 7 || pf.prime == 13));
    mpz_class a(kNumA), b(kNumB);
    mpz_class norm = a * a + 3 * b * b;
    auto num = factor_integer(norm);
    std::vector<mpz_class> primes;
    mpz_class back = 1;
    for (const auto& pf : num) {
        primes.push_back(pf.prime);
        mpz_class pe;
        mpz_pow_ui(pe.get_mpz_t(), pf.prime.get_mpz_t(), pf.exponent);
        back *= pe;
    }
    CHECK(back == norm);
    for (long p : {2, 3, 5, 43, 67, 103})
        CHECK(std::find(primes.begin(), primes.end(), mpz_class(p)) != primes.end());
    mpz_class big("141264461964750634089522953623");
    auto it = std::find_if(num.begin(), num.end(), [&](const PrimeFactor& pf) { return pf.prime == big; });
    REQUIRE(it != num.end());
    CHECK(it->probable);
}

TEST_CASE("factor_integer matches trial division") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<unsigned long> d(1, 999999999999UL);
    for (int t = 0; t < 200; ++t) {
        unsigned long n = d(rng);
        auto oracle = trial_factor(n);
        auto f = factor_integer(mpz_class(n));
        REQUIRE(f.size() == oracle.size());
        for (size_t i = 0; i < f.size(); ++i) {
            CHECK(f[i].prime == oracle[i].first);
            CHECK(f[i].exponent == oracle[i].second);
        }
    }
}

TEST_CASE("factor_integer respects the time budget") {
    // product of two 40-digit primes cannot be split by Pollard rho in 50 ms
    mpz_class p, q;
    mpz_nextprime(p.get_mpz_t(), mpz_class("1000000000000000000000000000000000000000").get_mpz_t());
    mpz_nextprime(q.get_mpz_t(), mpz_class("3000000000000000000000000000000000000000").get_mpz_t());
    try {
        factor_integer(p * q, std::chrono::milliseconds(50));
        FAIL("expected a resource-limit error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ResourceLimit);
    }
}

TEST_CASE("exact polynomials") {
    ExactPoly x = ExactPoly::monomial(Cyclotomic(1, 1), 1);
    ExactPoly one = ExactPoly::constant(Cyclotomic(1, 1));
    ExactPoly p = (x - one) * (x + one);
    CHECK(p == ExactPoly::from_integers({-1, 0, 1}));
    CHECK(p.degree() == 2);
    CHECK(p.eval(Cyclotomic(1, 3)).rational_value() == 8);
    CHECK(p.derivative() == ExactPoly::from_integers({0, 2}));
    CHECK((p - p).is_zero());
}

}  // TEST_SUITE
