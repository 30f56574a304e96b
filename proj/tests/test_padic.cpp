#include <doctest.h>

#include <random>

#include "symsq/error.hpp"
#include "symsq/padic.hpp"

using namespace symsq;

namespace {

// rank of a square matrix over F_p, independent of the library elimination
bool invertible_mod_p(std::vector<std::vector<long>> a, long p) {
    long n = static_cast<long>(a.size());
    for (long c = 0; c < n; ++c) {
        long piv = -1;
        for (long r = c; r < n; ++r)
            if (a[r][c] % p != 0) piv = r;
        if (piv < 0) return false;
        std::swap(a[piv], a[c]);
        long inv = 1;
        while ((a[c][c] * inv) % p != 1) ++inv;
        for (long r = c + 1; r < n; ++r) {
            long f = (a[r][c] * inv) % p;
            for (long j = c; j < n; ++j) a[r][j] = ((a[r][j] - f * a[c][j]) % p + p) % p;
        }
    }
    return true;
}

GroupRingElt random_element(long p, long k, const std::vector<long>& orders, std::mt19937_64& rng) {
    GroupRingElt x(p, k, orders);
    long m = 1;
    for (long i = 0; i < k; ++i) m *= p;
    std::uniform_int_distribution<long> d(0, m - 1);
    for (long i = 0; i < x.group_order(); ++i) x[i] = d(rng);
    return x;
}

std::vector<std::vector<long>> multiplication_matrix_mod_p(const GroupRingElt& x, long p) {
    long n = x.group_order();
    std::vector<std::vector<long>> a(n, std::vector<long>(n, 0));
    for (long j = 0; j < n; ++j)
        for (long h = 0; h < n; ++h) a[x.multiply_index(h, j)][j] = mpz_class(x[h] % p).get_si();
    return a;
}

}  // namespace

TEST_SUITE("padic") {

TEST_CASE("rational arithmetic and precision bookkeeping") {
    mpz_class p = 7;
    PadicNumber a = PadicNumber::from_rational(p, mpq_class(1, 3), 10);
    PadicNumber b = PadicNumber::from_rational(p, mpq_class(3), 10);
    CHECK((a * b).equals_mod(PadicNumber::from_rational(p, 1, 10), 10));
    PadicNumber c = PadicNumber::from_rational(p, mpq_class(49, 5), 6);
    CHECK(c.valuation() == 2);
    CHECK(c.absolute_precision() == 8);
    CHECK(PadicNumber::from_rational(p, mpq_class(2, 7)).valuation() == -1);
    // cancellation reduces relative precision
    PadicNumber x = PadicNumber::from_rational(p, 1, 5);
    PadicNumber y = PadicNumber::from_rational(p, 1 + 7 * 7 * 7, 5);
    PadicNumber d = y - x;
    CHECK(d.valuation() == 3);
    CHECK(d.absolute_precision() == 5);
    PadicNumber z = x - x;
    CHECK(z.is_zero());
    CHECK_FALSE(z.is_exact_zero());
    CHECK(z.absolute_precision() == 5);
    CHECK(PadicNumber::exact_zero(p).valuation() == LONG_MAX);
    CHECK_THROWS_AS(z.inverse(), Error);
    CHECK(x.to_string() == "1 + O(7^5)");
    CHECK(PadicNumber::from_rational(p, 50, 3).to_string() == "1 + 1*7^2 + O(7^3)");
}

TEST_CASE("digits of rationals") {
    // -1 = (p-1) + (p-1) p + ...
    PadicNumber m1 = PadicNumber::from_rational(5, -1, 6);
    for (long e = 0; e < 6; ++e) CHECK(m1.digit(e) == 4);
    CHECK_THROWS_AS(m1.digit(6), Error);
    // digits reconstruct the residue
    PadicNumber q = PadicNumber::from_rational(11, mpq_class(22, 9), 7);
    mpz_class back = 0, pe = 1;
    for (long e = 0; e < 8; ++e) {
        back += q.digit(e) * pe;
        pe *= 11;
    }
    CHECK(back == q.residue(8));
    CHECK((back * 9 - 22) % pe == 0);
}

TEST_CASE("Hensel lifting") {
    PadicNumber one = hensel_root(ExactPoly::from_integers({-1, 0, 1}), 7, 1, 10);
    CHECK(one.equals_mod(PadicNumber::from_rational(7, 1, 10), 10));
    PadicNumber r = hensel_root(ExactPoly::from_integers({-2, 0, 1}), 7, 3, 20);
    CHECK((r * r).equals_mod(PadicNumber::from_rational(7, 2, 20), 20));
    CHECK(r.digit(0) == 3);
    CHECK_THROWS_AS(hensel_root(ExactPoly::from_integers({-2, 0, 1}), 7, 2, 5), Error);
    try {
        hensel_root(ExactPoly::from_integers({0, 0, 1}), 7, 0, 5);
        FAIL("expected a non-simple root error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonSimpleRoot);
    }
}

TEST_CASE("unit root of a Hecke polynomial at 37") {
    mpz_class a37("-1033652081554"), p = 37, p15;
    mpz_pow_ui(p15.get_mpz_t(), p.get_mpz_t(), 15);
    PadicNumber alpha = hensel_root(ExactPoly::from_integers({p15, -a37, 1}), p, a37 % 37 + 37, 8);
    CHECK(alpha.digit(0) == 11);
    CHECK(alpha.digit(1) == 7);
    CHECK(alpha.digit(2) == 25);
    CHECK(alpha.is_unit());
    // beta = p^15 / alpha has valuation 15 and alpha + beta = a_37
    PadicNumber beta = PadicNumber::from_rational(p, p15, 8) / alpha;
    CHECK(beta.valuation() == 15);
    CHECK((alpha + beta).equals_mod(PadicNumber::from_rational(p, a37, 8), 8));
}

TEST_CASE("quadratic embeddings") {
    PadicEmbedding e439 = make_embedding(-3, 439, 14, 9, 10);
    QuadraticNumber g(-3, 14, 9);
    CHECK(embed_quadratic(g, e439).valuation() == 1);
    CHECK(embed_quadratic(g.conj(), e439).valuation() == 0);
    CHECK((e439.root * e439.root).equals_mod(PadicNumber::from_rational(439, -3, 10), 10));

    PadicEmbedding e37 = make_embedding(-3, 37, 5, -2, 10);
    CHECK(embed_quadratic(QuadraticNumber(-3, 5, -2), e37).valuation() >= 1);
    CHECK_THROWS_AS(make_embedding(-3, 37, 5, 3, 10), Error);
    CHECK_THROWS_AS(make_embedding(-3, 3, 0, 1, 10), Error);
    CHECK_THROWS_AS(embed_quadratic(QuadraticNumber(-3, mpq_class(1, 37), 0), e37), Error);

    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> d(-50, 50);
    for (int t = 0; t < 50; ++t) {
        QuadraticNumber x(-3, d(rng), d(rng)), y(-3, d(rng), d(rng));
        PadicNumber ex = embed_quadratic(x, e37), ey = embed_quadratic(y, e37);
        PadicNumber exy = embed_quadratic(x * y, e37);
        PadicNumber prod = ex * ey;
        long n = std::min(exy.absolute_precision(), prod.absolute_precision());
        CHECK(exy.equals_mod(prod, n));
    }
}

TEST_CASE("root of unity embeddings") {
    RootOfUnityEmbedding r = make_root_embedding(43, 3, 10);
    CHECK(r.zeta.pow(3).equals_mod(PadicNumber::from_rational(43, 1, 10), 10));
    CHECK_FALSE(r.zeta.equals_mod(PadicNumber::from_rational(43, 1, 10), 1));
    CHECK_THROWS_AS(make_root_embedding(43, 5, 10), Error);

    // compatibility of the two routes for zeta_3
    PadicEmbedding e = make_embedding(-3, 67, 8, 1, 10);
    RootOfUnityEmbedding z = root_embedding_from_quadratic(e, 3);
    Cyclotomic w = Cyclotomic::zeta(3) * mpq_class(5) + Cyclotomic(3, mpq_class(2, 3));
    CHECK(embed_cyclotomic(w, z).equals_mod(embed_cyclotomic(w, e), 10));
    RootOfUnityEmbedding z6 = root_embedding_from_quadratic(e, 6);
    CHECK(z6.zeta.pow(2).equals_mod(z.zeta, 10));
    CHECK(z6.zeta.pow(3).equals_mod(PadicNumber::from_rational(67, -1, 10), 10));
}

TEST_CASE("group ring inverse against the geometric series") {
    // (1 - 2g)^{-1} = (1 - 2^37)^{-1} sum_{i<37} 2^i g^i in (Z/37^2)[C_37]
    const long k = 2;
    std::vector<long> c37{37};
    GroupRingElt x = GroupRingElt::one(37, k, c37) - GroupRingElt::term(37, k, c37, 2, {1});
    auto inv = groupring_invert(x);
    REQUIRE(inv.has_value());
    mpz_class m = 37 * 37;
    mpz_class two37;
    mpz_powm_ui(two37.get_mpz_t(), mpz_class(2).get_mpz_t(), 37, m.get_mpz_t());
    mpz_class s;
    mpz_class base = (1 - two37) % m;
    if (base < 0) base += m;
    mpz_invert(s.get_mpz_t(), base.get_mpz_t(), m.get_mpz_t());
    mpz_class pw = 1;
    for (long i = 0; i < 37; ++i) {
        mpz_class expect = (s * pw) % m;
        CHECK((*inv)[i] == expect);
        pw = (pw * 2) % m;
    }
    // u = 1 gives augmentation 0
    GroupRingElt y = GroupRingElt::one(37, k, c37) - GroupRingElt::term(37, k, c37, 1, {1});
    CHECK_FALSE(groupring_invert(y).has_value());
    GroupRingElt y38 = GroupRingElt::one(37, k, c37) - GroupRingElt::term(37, k, c37, 38, {1});
    CHECK_FALSE(groupring_invert(y38).has_value());
}

TEST_CASE("group ring: augmentation criterion on p-groups") {
    std::mt19937_64 rng(29);
    for (auto [p, orders] : std::vector<std::pair<long, std::vector<long>>>{
             {3, {3}}, {3, {3, 3}}, {5, {5}}, {2, {2, 4}}, {3, {9}}}) {
        for (int t = 0; t < 40; ++t) {
            GroupRingElt x = random_element(p, 3, orders, rng);
            bool unit = (x.augmentation() % p) != 0;
            auto inv = groupring_invert(x);
            CHECK(inv.has_value() == unit);
            if (inv) CHECK((x * *inv).is_one());
        }
    }
}

TEST_CASE("group ring: determinant modulo p on mixed groups") {
    std::mt19937_64 rng(31);
    for (auto [p, orders] : std::vector<std::pair<long, std::vector<long>>>{
             {7, {3}}, {7, {2, 3}}, {5, {4}}, {3, {5, 5}}, {2, {5, 5, 5}}}) {
        int units = 0;
        for (int t = 0; t < 30; ++t) {
            GroupRingElt x = random_element(p, 2, orders, rng);
            if (t % 3 == 0) {
                // force a non-unit through a character: x = (1 - g) * y
                GroupRingElt g = GroupRingElt::term(p, 2, orders, 1, std::vector<long>(orders.size(), 1));
                x = (GroupRingElt::one(p, 2, orders) - g) * x;
            }
            bool expected = invertible_mod_p(multiplication_matrix_mod_p(x, p), p);
            auto inv = groupring_invert(x);
            CHECK(inv.has_value() == expected);
            units += expected;
        }
        CHECK(units > 0);
    }
}

TEST_CASE("group ring: exhaustive search on tiny rings") {
    for (auto [p, k, orders] : std::vector<std::tuple<long, long, std::vector<long>>>{
             {2, 2, {2}}, {3, 1, {2}}, {2, 1, {3}}, {3, 1, {2, 2}}}) {
        long m = 1;
        for (long i = 0; i < k; ++i) m *= p;
        GroupRingElt proto(p, k, orders);
        long n = proto.group_order();
        long total = 1;
        for (long i = 0; i < n; ++i) total *= m;
        std::vector<GroupRingElt> all;
        for (long code = 0; code < total; ++code) {
            GroupRingElt e(p, k, orders);
            long c = code;
            for (long i = 0; i < n; ++i) {
                e[i] = c % m;
                c /= m;
            }
            all.push_back(e);
        }
        for (const auto& x : all) {
            bool found = false;
            for (const auto& y : all)
                if ((x * y).is_one()) found = true;
            CHECK(groupring_invert(x).has_value() == found);
        }
    }
}

}  // TEST_SUITE
