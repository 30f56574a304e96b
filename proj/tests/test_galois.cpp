#include <doctest.h>

#include <random>
#include <set>

#include "symsq/error.hpp"
#include "symsq/galois.hpp"

using namespace symsq;

namespace {

const HeckeData& hecke16_big() {
    static const HeckeData h = hecke_data(level1_eigenform(16, 10000));
    return h;
}

// p-adic Smith form of an integer 3x3 matrix through determinantal divisors:
// returns how many invariant factors are divisible by p.
int invariant_factors_divisible(const Mat3& m, long p) {
    auto vp = [&](mpz_class x) {
        if (x == 0) return 1000;
        int v = 0;
        while (x % p == 0) {
            x /= p;
            ++v;
        }
        return v;
    };
    int d1 = 1000, d2 = 1000;
    for (long x : m) d1 = std::min(d1, vp(x));
    for (int r1 = 0; r1 < 3; ++r1)
        for (int r2 = r1 + 1; r2 < 3; ++r2)
            for (int c1 = 0; c1 < 3; ++c1)
                for (int c2 = c1 + 1; c2 < 3; ++c2) {
                    mpz_class minor = mpz_class(m[3 * r1 + c1]) * m[3 * r2 + c2] - mpz_class(m[3 * r1 + c2]) * m[3 * r2 + c1];
                    d2 = std::min(d2, vp(minor));
                }
    mpz_class det = 0;
    for (int c = 0; c < 3; ++c) {
        mpz_class minor = mpz_class(m[3 + (c + 1) % 3]) * m[6 + (c + 2) % 3] - mpz_class(m[3 + (c + 2) % 3]) * m[6 + (c + 1) % 3];
        det += m[c] * minor;
    }
    int d3 = vp(det);
    int count = 0;
    if (d1 > 0) ++count;
    if (d2 - d1 > 0) ++count;
    if (d3 - d2 > 0) ++count;
    return count;
}

Mat3 mul3(const Mat3& a, const Mat3& b, long p) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            long s = 0;
            for (int t = 0; t < 3; ++t) s += a[3 * i + t] * b[3 * t + j];
            c[3 * i + j] = ((s % p) + p) % p;
        }
    return c;
}

long inv_mod(long a, long p) {
    for (long x = 1; x < p; ++x)
        if ((a * x) % p == 1) return x;
    return 0;
}

// Adjugate inverse of an invertible 3x3 matrix mod p.
Mat3 inverse3(const Mat3& m, long p) {
    Mat3 adj{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r1 = (j + 1) % 3, r2 = (j + 2) % 3, c1 = (i + 1) % 3, c2 = (i + 2) % 3;
            adj[3 * i + j] = m[3 * r1 + c1] * m[3 * r2 + c2] - m[3 * r1 + c2] * m[3 * r2 + c1];
        }
    long det = 0;
    for (int c = 0; c < 3; ++c) det += m[c] * adj[3 * c];
    long di = inv_mod(((det % p) + p) % p, p);
    for (auto& x : adj) x = ((x % p + p) % p) * di % p;
    return adj;
}

Mat3 random_invertible(std::mt19937& rng, long p) {
    std::uniform_int_distribution<long> d(0, p - 1);
    for (;;) {
        Mat3 m;
        for (auto& x : m) x = d(rng);
        if (rank_mod_p(m, p) == 3) return m;
    }
}

}  // namespace

TEST_SUITE("galois") {

TEST_CASE("graded characters of the ordinary filtration") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    PadicEmbedding e37 = make_embedding(-3, 37, 5, -2, 12);
    CyclotomicEmbedder emb = [&](const Cyclotomic& c) { return embed_cyclotomic(c, e37); };
    OrdinaryRoots roots = ordinary_roots(hecke16_big().a_prime.at(37), 37, 16, 12);
    auto gr = graded_characters(16, 37, roots, psi.value(37), Cyclotomic(1, 1), emb);
    CHECK(gr[0].cyclotomic_exponent == 1);
    CHECK(gr[1].cyclotomic_exponent == 16);
    CHECK(gr[2].cyclotomic_exponent == 31);
    for (const auto& g : gr) CHECK(g.h0_vanishes);
    // product of the three Frobenius values is (eps psi(p))^3 eps(p)^0 = psi(37)^3 = 1
    PadicNumber prod = gr[0].frobenius * gr[1].frobenius * gr[2].frobenius;
    CHECK(prod.equals_mod(PadicNumber::from_rational(37, 1), 10));
    CHECK(gr[0].frobenius.equals_mod(roots.alpha * roots.alpha * emb(psi.value(37)), 12));

    auto triv = graded_characters(16, 37, roots, Cyclotomic(1, 1), Cyclotomic(1, 1), emb);
    CHECK_FALSE(triv[1].h0_vanishes);
    CHECK(triv[0].h0_vanishes);
    CHECK(triv[2].h0_vanishes);
}

TEST_CASE("classification of points") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    PointInput in;
    in.k = 16;
    in.p = 37;
    in.j = 22;
    in.chi = DirichletCharacter::trivial(37);
    in.psi = psi;
    in.eps = DirichletCharacter::trivial(1);
    PointClassification c = classify_point(in);
    CHECK(c.critical);
    CHECK(c.delta == 1);
    CHECK(c.m == 2);
    CHECK_FALSE(c.e_vanishes);
    CHECK_FALSE(c.eprime_vanishes);
    CHECK_FALSE(c.exceptional);
    REQUIRE(c.unfortunate.has_value());
    CHECK_FALSE(*c.unfortunate);
    CHECK(c.c_witness == 5);
    CHECK(c.schneider_caveat);

    // criticality and the m step function over a brute-force range
    for (int par : {1, -1}) {
        DirichletCharacter ps = par == 1 ? psi : DirichletCharacter::parse("7.3");
        REQUIRE(ps.parity() == par);
        int last_m = -1;
        for (long j = -5; j <= 37; ++j) {
            in.psi = ps;
            in.j = j;
            PointClassification r = classify_point(in);
            bool left = j >= 1 && j <= 15 && ((j % 2 == 0) ? 1 : -1) == -par;
            bool right = j >= 16 && j <= 30 && ((j % 2 == 0) ? 1 : -1) == par;
            CHECK(r.critical == (left || right));
            if (r.critical) CHECK(r.delta == (right ? 1 : 0));
            CHECK(r.m >= last_m);
            CHECK(r.m == (j <= 0 ? 0 : j <= 15 ? 1 : j <= 30 ? 2 : 3));
            last_m = r.m;
        }
    }

    // eps psi(p) = 1 with chi = 1 at j = k: exceptional zero
    in.psi = psi;
    in.p = 43;
    in.chi = DirichletCharacter::trivial(43);
    in.j = 16;
    c = classify_point(in);
    CHECK(c.exceptional);
    CHECK(c.eprime_vanishes);
    CHECK_FALSE(c.e_vanishes);
    CHECK(c.unfortunate == false);
    in.j = 15;
    c = classify_point(in);
    CHECK(c.e_vanishes);
    CHECK_FALSE(c.exceptional);

    // trivial psi at j = k: pole cancelled by the c-factor
    in.psi = DirichletCharacter::trivial(1);
    in.p = 37;
    in.chi = DirichletCharacter::trivial(37);
    in.j = 16;
    c = classify_point(in);
    CHECK(c.exceptional);
    CHECK(c.pole_cancelled);
    CHECK(c.unfortunate == false);
    // trivial psi, j > k: 37 is irregular, so nonvanishing is only assumed off the k-component
    in.j = 18;
    c = classify_point(in);
    CHECK(c.schneider_caveat);
    in.p = 41;
    in.chi = DirichletCharacter::trivial(41);
    c = classify_point(in);
    CHECK_FALSE(c.schneider_caveat);

    // quadratic eps psi with chi = 1 at j = k: unfortunate
    in.psi = DirichletCharacter::parse("5.4");
    REQUIRE(in.psi.parity() == 1);
    in.p = 7;
    in.chi = DirichletCharacter::trivial(7);
    in.j = 16;
    c = classify_point(in);
    REQUIRE(c.unfortunate.has_value());
    CHECK(*c.unfortunate);
    CHECK_FALSE(c.obstruction.empty());
    // quadratic chi of 7-power conductor with trivial-squared eps psi: also unfortunate
    in.psi = DirichletCharacter::parse("4.3");
    in.chi = DirichletCharacter::parse("7.6");
    REQUIRE(in.chi.order() == 2);
    c = classify_point(in);
    CHECK(c.unfortunate == true);
    // cubic chi escapes the obstruction
    in.chi = DirichletCharacter::parse("7.2");
    in.psi = DirichletCharacter::parse("5.4");
    c = classify_point(in);
    CHECK(c.unfortunate == false);
    CHECK(c.c_witness > 1);
    // away from j = k any c works
    in.chi = DirichletCharacter::trivial(7);
    in.j = 18;
    c = classify_point(in);
    CHECK(c.unfortunate == false);
    CHECK(c.c_witness == 11);
}

TEST_CASE("multiplier vanishing agrees with the p-adic computation") {
    const HeckeData& h = hecke16_big();
    struct Case {
        long p;
        const char* psi;
    };
    for (Case cs : {Case{37, "7.2"}, Case{37, "1.1"}, Case{43, "7.2"}, Case{43, "7.3"}}) {
        DirichletCharacter psi = DirichletCharacter::parse(cs.psi);
        RootOfUnityEmbedding re = make_root_embedding(cs.p, 6, 10);
        CyclotomicEmbedder emb = [&](const Cyclotomic& c) { return embed_cyclotomic(c, re); };
        REQUIRE(h.a_prime.at(cs.p) % cs.p != 0);
        OrdinaryRoots roots = ordinary_roots(h.a_prime.at(cs.p), cs.p, 16, 10);
        for (long r : {0L, 1L}) {
            PointInput in;
            in.k = 16;
            in.p = cs.p;
            in.chi = r == 0 ? DirichletCharacter::trivial(cs.p) : DirichletCharacter::conrey(cs.p, 2);
            in.psi = psi;
            in.eps = DirichletCharacter::trivial(1);
            for (long j = 1; j <= 31; ++j) {
                in.j = j;
                PointClassification pc = classify_point(in);
                InterpMultiplier e =
                    interp_multiplier(MultiplierKind::E, j, r, 16, cs.p, roots, psi.value(cs.p), Cyclotomic(1, 1), emb);
                InterpMultiplier e2 = interp_multiplier(MultiplierKind::EPrime, j, r, 16, cs.p, roots, psi.value(cs.p),
                                                        Cyclotomic(1, 1), emb);
                CHECK(pc.e_vanishes == e.vanishes);
                CHECK(pc.eprime_vanishes == e2.vanishes);
            }
        }
    }
}

TEST_CASE("rank table and Selmer order") {
    CHECK(rank_table(0, true) == 2);
    CHECK(rank_table(2, true) == 0);
    CHECK(rank_table(0, false) == 1);
    CHECK(rank_table(3, false) == -2);
    CHECK_THROWS_AS(rank_table(4, true), Error);
    CHECK(predict_selmer_order(37, 0, 1, 1) == 1);
    CHECK(predict_selmer_order(67, 1, 1, 1) == 67);
    CHECK(predict_selmer_order(37, 0, 2, 1) == 1);
    CHECK(predict_selmer_order(7, 2, 1, 7) == 7);
    try {
        predict_selmer_order(7, 1, 1, 49);
        FAIL("expected a divisibility error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divisibility);
    }
}

TEST_CASE("hypotheses for the weight 16 example") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    DirichletCharacter eps = DirichletCharacter::trivial(1);
    auto ex = weight16_exceptional_primes();
    HypothesisReport r = hypothesis_check(37, psi, eps, ex);
    CHECK(r.all_pass());
    CHECK(r.u == 2);

    // exhaustive oracle: u admissible iff psi(u) is a primitive cube root of unity
    std::set<long> admissible;
    for (long u = 1; u < 7; ++u)
        if (psi.exponent(u) != 0) admissible.insert(u);
    CHECK(admissible == std::set<long>{2, 3, 4, 5});

    HypothesisReport big = hypothesis_check(3617, psi, eps, ex);
    CHECK_FALSE(big["big image"].pass);
    HypothesisReport small = hypothesis_check(5, psi, eps, ex);
    CHECK_FALSE(small["p>=7"].pass);
    HypothesisReport nosplit = hypothesis_check(41, psi, eps, ex);
    CHECK_FALSE(nosplit["degree-one prime"].pass);
    HypothesisReport triv = hypothesis_check(37, DirichletCharacter::trivial(7), eps, ex);
    CHECK_FALSE(triv["u exists"].pass);
    CHECK_FALSE(triv["eps psi(p) != 1"].pass);
    HypothesisReport at43 = hypothesis_check(43, psi, eps, ex);
    CHECK_FALSE(at43["eps psi(p) != 1"].pass);
}

TEST_CASE("Kolyvagin prime scan") {
    const HeckeData& h = hecke16_big();
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    ResidueEmbedding emb = residue_embedding(root_embedding_from_quadratic(make_embedding(-3, 37, 5, -2, 4), 3));
    CHECK(emb.zeta == 10);
    PrimeScan scan = prime_scan(37, h, psi, emb, 10000);
    CHECK_FALSE(scan.primes.empty());
    CHECK(scan.examined == static_cast<long>(scan.primes.size() + scan.ambiguous.size()) +
                               [&] {
                                   long rejected = 0;
                                   for (long l = 38; l <= 10000; l += 37) {
                                       bool prime = l > 1;
                                       for (long d = 2; d * d <= l; ++d)
                                           if (l % d == 0) prime = false;
                                       if (!prime || l == 7) continue;
                                       FrobeniusModel fm = frobenius_model(37, h, psi, emb, l);
                                       if (fm.regular_semisimple && !(fm.cyclic_cokernel() && fm.t_prime != 1))
                                           ++rejected;
                                   }
                                   return rejected;
                               }());
    for (const FrobeniusModel& fm : scan.primes) {
        CHECK(fm.ell % 37 == 1);
        Mat3 am = fm.A;
        for (int i = 0; i < 3; ++i) am[4 * i] -= 1;
        CHECK(invariant_factors_divisible(am, 37) <= 1);
        CHECK(fm.t_prime != 1);
        // trace and determinant against the Euler factor, mod 37
        long a = mpz_class(h.a_prime.at(fm.ell) % 37).get_si();
        long c = mpz_class(mpz_class(fm.ell) % 37).get_si();  // l = 1 mod 37, so l^15 = 1
        REQUIRE(c == 1);
        long ps = emb.value(psi, fm.ell);
        long tr = (fm.A[0] + fm.A[4] + fm.A[8]) % 37;
        CHECK(((tr - ps * ((a * a - 1) % 37)) % 37 + 37) % 37 == 0);
    }
    for (const FrobeniusModel& fm : scan.ambiguous) {
        long a = mpz_class(h.a_prime.at(fm.ell) % 37).get_si();
        CHECK(((a * a - 4) % 37 + 37) % 37 == 0);
    }

    // synthetic identity action: rank zero, excluded
    Mat3 zero{};
    CHECK(rank_mod_p(zero, 37) == 0);
    CHECK(invariant_factors_divisible(Mat3{37, 0, 0, 0, 37, 0, 0, 0, 74}, 37) == 3);
}

TEST_CASE("tau witness") {
    DirichletCharacter psi = DirichletCharacter::parse("7.2");
    DirichletCharacter eps = DirichletCharacter::trivial(1);
    ResidueEmbedding emb = make_residue_embedding(37, 3);
    TauWitness w = find_tau(37, psi, eps, emb);
    CHECK(verify_tau(37, w.model, w.psi_u));
    CHECK(w.t_prime != 1);
    CHECK(rank_mod_p(w.action, 37) == 3);

    // u = 3: diagonal action (psi(3)^2, psi(3), 1) has exactly one eigenvalue 1
    long p3 = emb.value(psi, 3);
    long r = 0;
    for (long x = 1; x < 37; ++x)
        if (x * x % 37 == p3) r = x;
    REQUIRE(r != 0);
    Mat2 model{r, 0, 0, inv_mod(r, 37)};
    CHECK(verify_tau(37, model, p3));
    Mat3 act = sym2_matrix(model, 37);
    for (auto& x : act) x = x * p3 % 37;
    CHECK(act[0] == p3 * p3 % 37);
    CHECK(act[4] == p3);
    CHECK(act[8] == 1);

    // conjugate models pass the same checks
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> d(0, 36);
    for (int t = 0; t < 50; ++t) {
        Mat2 P{d(rng), d(rng), d(rng), d(rng)};
        long det = ((P[0] * P[3] - P[1] * P[2]) % 37 + 37) % 37;
        if (det == 0) continue;
        long di = inv_mod(det, 37);
        Mat2 Pi{P[3] * di % 37, (37 - P[1]) * di % 37, (37 - P[2]) * di % 37, P[0] * di % 37};
        auto m2 = [](const Mat2& a, const Mat2& b) {
            return Mat2{(a[0] * b[0] + a[1] * b[2]) % 37, (a[0] * b[1] + a[1] * b[3]) % 37,
                        (a[2] * b[0] + a[3] * b[2]) % 37, (a[2] * b[1] + a[3] * b[3]) % 37};
        };
        CHECK(verify_tau(37, m2(m2(P, w.model), Pi), w.psi_u));
    }
    CHECK_FALSE(verify_tau(37, Mat2{1, 0, 0, 1}, 1));

    try {
        find_tau(37, DirichletCharacter::trivial(7), eps, emb);
        FAIL("expected no witness");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoWitness);
    }
}

TEST_CASE("first cohomology by brute force") {
    H1Result triv = h1_brute_force({}, 7);
    CHECK(triv.dimension == 0);
    CHECK(triv.group_order == 1);

    // cyclic group of a regular unipotent: crossed homomorphisms counted directly
    const long p = 7;
    Mat3 U{1, 1, 0, 0, 1, 1, 0, 0, 1};
    H1Result hu = h1_brute_force({U}, p);
    CHECK(hu.group_order == 7);
    std::vector<Mat3> powers{Mat3{1, 0, 0, 0, 1, 0, 0, 0, 1}};
    for (int i = 1; i < 7; ++i) powers.push_back(mul3(powers.back(), U, p));
    long z1 = 0;
    std::set<std::array<long, 3>> b1;
    for (long v = 0; v < p * p * p; ++v) {
        std::array<long, 3> x{v % p, (v / p) % p, v / (p * p)};
        std::array<long, 3> s{0, 0, 0};
        for (const Mat3& g : powers)
            for (int i = 0; i < 3; ++i)
                for (int t = 0; t < 3; ++t) s[i] = (s[i] + g[3 * i + t] * x[t]) % p;
        if (s == std::array<long, 3>{0, 0, 0}) ++z1;
        std::array<long, 3> b{};
        for (int i = 0; i < 3; ++i) {
            long acc = -x[i];
            for (int t = 0; t < 3; ++t) acc += U[3 * i + t] * x[t];
            b[i] = ((acc % p) + p) % p;
        }
        b1.insert(b);
    }
    long quotient = z1 / static_cast<long>(b1.size());
    long dim = 0;
    while (quotient > 1) {
        quotient /= p;
        ++dim;
    }
    CHECK(hu.dimension == dim);
    CHECK(dim == 1);

    // conjugation invariance
    std::mt19937 rng(11);
    for (int t = 0; t < 5; ++t) {
        Mat3 P = random_invertible(rng, p);
        Mat3 Pi = inverse3(P, p);
        REQUIRE(mul3(P, Pi, p) == (Mat3{1, 0, 0, 0, 1, 0, 0, 0, 1}));
        CHECK(h1_brute_force({mul3(mul3(P, U, p), Pi, p)}, p).dimension == hu.dimension);
    }

    // image of SL_2(F_7) under the symmetric square
    Mat3 S = sym2_matrix(Mat2{0, 6, 1, 0}, 7);
    Mat3 T = sym2_matrix(Mat2{1, 1, 0, 1}, 7);
    H1Result hs = h1_brute_force({S, T}, 7);
    CHECK(hs.group_order == 168);
    CHECK(hs.dimension == 0);
    CHECK(hs.coboundary_dim == 3);
    Mat3 P = random_invertible(rng, 7);
    Mat3 Pi = inverse3(P, 7);
    CHECK(h1_brute_force({mul3(mul3(P, S, 7), Pi, 7), mul3(mul3(P, T, 7), Pi, 7)}, 7).dimension == 0);

    try {
        h1_brute_force({S, T}, 7, 100);
        FAIL("expected group-too-large");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GroupTooLarge);
    }
}

}  // TEST_SUITE
