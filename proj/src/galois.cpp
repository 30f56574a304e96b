#include "symsq/galois.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "symsq/error.hpp"

namespace symsq {

namespace {

long mod(long a, long p) {
    long r = a % p;
    return r < 0 ? r + p : r;
}

long mulmod(long a, long b, long p) { return static_cast<long>((static_cast<__int128>(a) * b) % p); }

long powmod(long b, long e, long p) {
    long r = 1 % p;
    b = mod(b, p);
    while (e > 0) {
        if (e & 1) r = mulmod(r, b, p);
        b = mulmod(b, b, p);
        e >>= 1;
    }
    return r;
}

long invmod(long a, long p) {
    a = mod(a, p);
    if (a == 0) fail(ErrorKind::Domain, "zero has no inverse mod " + std::to_string(p));
    return powmod(a, p - 2, p);
}

bool is_prime(long n) {
    if (n < 2) return false;
    for (long d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// chi(a) as a fraction of a full turn, or nothing when chi(a) = 0.
std::optional<mpq_class> angle(const DirichletCharacter& chi, long a) {
    long e = chi.exponent(mod(a, chi.modulus()));
    if (e < 0) return std::nullopt;
    mpq_class q(e, chi.order());
    q.canonicalize();
    return q;
}

bool is_integer(const mpq_class& q) { return q.get_den() == 1; }

long order_lcm(const DirichletCharacter& a, const DirichletCharacter& b) { return std::lcm(a.order(), b.order()); }

// eps psi(a) mod p through two characters of coprime or equal moduli.
long eps_psi_residue(const ResidueEmbedding& emb, const DirichletCharacter& eps, const DirichletCharacter& psi, long a) {
    return mulmod(emb.value(eps, a), emb.value(psi, a), emb.p);
}

}  // namespace

std::array<GradedCharacter, 3> graded_characters(int k, long p, const OrdinaryRoots& roots, const Cyclotomic& psi_p,
                                                 const Cyclotomic& eps_p, const CyclotomicEmbedder& embed) {
    mpz_class pz = p;
    PadicNumber psi = embed(psi_p);
    long prec = roots.alpha.absolute_precision();
    PadicNumber pk = PadicNumber::from_rational(pz, mpq_class(1), prec);
    for (int i = 0; i < 2 * k - 2; ++i) pk *= PadicNumber::from_rational(pz, mpq_class(p), prec);

    std::array<GradedCharacter, 3> gr;
    gr[0].cyclotomic_exponent = 1;
    gr[0].frobenius = roots.alpha * roots.alpha * psi;
    gr[0].archimedean_weight = k - 1;
    gr[1].cyclotomic_exponent = k;
    gr[1].frobenius = embed(eps_p * psi_p);
    gr[1].archimedean_weight = 0;
    gr[2].cyclotomic_exponent = 2 * k - 1;
    gr[2].frobenius = roots.beta * roots.beta * psi / pk;
    gr[2].archimedean_weight = 1 - k;
    for (auto& g : gr) {
        if (g.archimedean_weight != 0 || g.frobenius.valuation() != 0) {
            g.h0_vanishes = true;
        } else {
            // root of unity: trivial exactly when it is 1
            g.h0_vanishes = (eps_p * psi_p) != Cyclotomic(1, 1);
        }
    }
    return gr;
}

long ResidueEmbedding::value(const DirichletCharacter& chi, long a) const {
    if (m % chi.order() != 0)
        fail(ErrorKind::Domain, "character order " + std::to_string(chi.order()) + " does not divide " +
                                    std::to_string(m));
    long e = chi.exponent(mod(a, chi.modulus()));
    if (e < 0) return 0;
    return powmod(zeta, e * (m / chi.order()), p);
}

ResidueEmbedding make_residue_embedding(long p, long m) {
    return residue_embedding(make_root_embedding(mpz_class(p), m, 1));
}

ResidueEmbedding residue_embedding(const RootOfUnityEmbedding& emb) {
    ResidueEmbedding r;
    r.p = emb.p.get_si();
    r.m = emb.m;
    r.zeta = emb.zeta.residue(1).get_si();
    return r;
}

PointClassification classify_point(const PointInput& in) {
    const int k = in.k;
    const long p = in.p, j = in.j;
    if (k < 2 || !is_prime(p)) fail(ErrorKind::Domain, "classify_point needs k >= 2 and a prime p");
    long pm = in.chi.modulus();
    while (pm % p == 0) pm /= p;
    if (pm != 1) fail(ErrorKind::Domain, "chi must have p-power modulus");
    long level = in.psi.modulus() * in.eps.modulus();
    if (level % p == 0) fail(ErrorKind::Domain, "p divides N_f N_psi");

    PointClassification out;
    int parity = in.psi.parity() * in.chi.parity();
    Criticality cr = criticality(k, parity, j);
    out.critical = cr.critical;
    out.delta = cr.delta;
    out.m = j <= 0 ? 0 : j <= k - 1 ? 1 : j <= 2 * k - 2 ? 2 : 3;

    bool chi_trivial = in.chi.is_trivial();
    auto a_eps = angle(in.eps, p), a_psi = angle(in.psi, p);
    bool eps_psi_p_one = a_eps && a_psi && is_integer(*a_eps + *a_psi);
    out.e_vanishes = chi_trivial && eps_psi_p_one && j == k - 1;
    out.eprime_vanishes = chi_trivial && eps_psi_p_one && j == k;
    out.exceptional = out.eprime_vanishes;

    bool in_range = j >= k && j <= 2 * k - 2 && (j % 2 == 0 ? 1 : -1) * in.chi.parity() == in.psi.parity();
    if (!in_range) return out;

    auto eps_psi_pow_trivial = [&](long e) {
        long n = std::lcm(in.eps.modulus(), in.psi.modulus());
        for (long a = 1; a < n; ++a)
            if (std::gcd(a, n) == 1 && !is_integer(e * (*angle(in.eps, a) + *angle(in.psi, a)))) return false;
        return true;
    };
    bool eps_psi_trivial = eps_psi_pow_trivial(1);

    long bad = 6 * p * in.eps.modulus() * in.psi.modulus();
    for (long c = 2; c <= in.c_bound && out.c_witness == 0; ++c) {
        if (std::gcd(c, bad) != 1) continue;
        if (j != k || (chi_trivial && eps_psi_trivial)) {
            out.c_witness = c;
        } else {
            // c^2 - c^2 chi(c)^2 (eps psi)(c)^{-2} at j = k
            mpq_class t = 2 * *angle(in.chi, c) - 2 * (*angle(in.eps, c) + *angle(in.psi, c));
            if (!is_integer(t)) out.c_witness = c;
        }
    }

    if (j == k && chi_trivial && eps_psi_trivial) {
        out.pole_cancelled = true;
        out.unfortunate = false;
    } else if (out.c_witness != 0) {
        out.unfortunate = false;
    } else {
        bool chi_sq = in.chi.pow(2).is_trivial();
        bool ep_sq = eps_psi_pow_trivial(2);
        if (j == k && chi_sq && ep_sq) {
            out.unfortunate = true;
            out.obstruction = "j = k with chi and eps psi quadratic, not both trivial: the c-factor vanishes identically";
        } else {
            out.obstruction = "no c found below the search bound";
        }
    }

    if (j > k) {
        if (eps_psi_trivial) {
            bool regular = is_regular_prime(p).regular;
            long o = in.chi.order();
            while (o % p == 0) o /= p;
            bool same_component = o == 1 && (j - k) % (p - 1) == 0;
            out.schneider_caveat = !(regular || same_component);
        } else {
            out.schneider_caveat = true;
        }
    }
    return out;
}

int rank_table(int i, bool same_parity) {
    if (i < 0 || i > 3) fail(ErrorKind::Domain, "rank_table index must lie in 0..3");
    return same_parity ? 2 - i : 1 - i;
}

mpz_class predict_selmer_order(long p, long n, long c, const mpz_class& h0) {
    if (n < 0 || c < 1 || h0 <= 0) fail(ErrorKind::Domain, "predict_selmer_order needs n >= 0, c >= 1, h0 > 0");
    mpz_class total;
    mpz_ui_pow_ui(total.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(c * n));
    if (total % h0 != 0) fail(ErrorKind::Divisibility, "H^0 correction does not divide p^{cn}");
    return total / h0;
}

std::vector<long> weight16_exceptional_primes() { return {2, 3, 5, 7, 11, 31, 59, 3617}; }

bool HypothesisReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const HypothesisVerdict& v) { return v.pass; });
}

const HypothesisVerdict& HypothesisReport::operator[](const std::string& name) const {
    for (const auto& v : verdicts)
        if (v.name == name) return v;
    fail(ErrorKind::Domain, "no hypothesis named " + name);
}

HypothesisReport hypothesis_check(long p, const DirichletCharacter& psi, const DirichletCharacter& eps,
                                  const std::vector<long>& exceptional_primes) {
    HypothesisReport rep;
    auto add = [&](std::string name, bool pass, std::string witness = {}) {
        rep.verdicts.push_back({std::move(name), pass, std::move(witness)});
    };
    add("p>=7", p >= 7 && is_prime(p));
    long m = order_lcm(psi, eps);
    bool split = is_prime(p) && (p - 1) % m == 0;
    add("degree-one prime", split, "p = 1 mod " + std::to_string(m));
    bool big = std::find(exceptional_primes.begin(), exceptional_primes.end(), p) == exceptional_primes.end();
    add("big image", big);
    long n = std::lcm(psi.modulus(), eps.modulus());
    add("p prime to level", n % p != 0);

    bool found = false;
    if (split && n % p != 0) {
        ResidueEmbedding emb = make_residue_embedding(p, m);
        for (long u = 1; u < std::max(n, 2L) && !found; ++u) {
            if (std::gcd(u, n) != 1) continue;
            long ep = eps_psi_residue(emb, eps, psi, u);
            if (ep == 1 || ep == p - 1) continue;
            long ps = emb.value(psi, u);
            if (powmod(ps, (p - 1) / 2, p) != 1) continue;
            rep.u = u;
            found = true;
        }
    }
    add("u exists", found, found ? "u = " + std::to_string(rep.u) : std::string{});
    auto a = angle(eps, p), b = angle(psi, p);
    bool one = a && b && is_integer(*a + *b);
    add("eps psi(p) != 1", !one);
    return rep;
}

Mat3 sym2_matrix(const Mat2& g, long p) {
    long a = g[0], b = g[1], c = g[2], d = g[3];
    // columns are the images of e1^2, e1 e2, e2^2
    Mat3 s{mulmod(a, a, p), mulmod(a, b, p), mulmod(b, b, p),
           mulmod(2, mulmod(a, c, p), p), mod(mulmod(a, d, p) + mulmod(b, c, p), p), mulmod(2, mulmod(b, d, p), p),
           mulmod(c, c, p), mulmod(c, d, p), mulmod(d, d, p)};
    for (auto& x : s) x = mod(x, p);
    return s;
}

long rank_mod_p(std::vector<std::vector<long>> rows, long p) {
    long rank = 0;
    if (rows.empty()) return 0;
    size_t cols = rows[0].size();
    for (size_t c = 0; c < cols && rank < static_cast<long>(rows.size()); ++c) {
        size_t piv = rank;
        while (piv < rows.size() && mod(rows[piv][c], p) == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        long inv = invmod(rows[rank][c], p);
        for (auto& x : rows[rank]) x = mulmod(mod(x, p), inv, p);
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == static_cast<size_t>(rank)) continue;
            long f = mod(rows[r][c], p);
            if (f == 0) continue;
            for (size_t t = 0; t < cols; ++t) rows[r][t] = mod(rows[r][t] - mulmod(f, rows[rank][t], p), p);
        }
        ++rank;
    }
    return rank;
}

long rank_mod_p(const Mat3& a, long p) {
    std::vector<std::vector<long>> rows(3, std::vector<long>(3));
    for (int i = 0; i < 9; ++i) rows[i / 3][i % 3] = a[i];
    return rank_mod_p(std::move(rows), p);
}

FrobeniusModel frobenius_model(long p, const HeckeData& f, const DirichletCharacter& psi, const ResidueEmbedding& emb,
                               long ell) {
    auto it = f.a_prime.find(ell);
    if (it == f.a_prime.end()) fail(ErrorKind::MissingPrime, "a_l missing for l = " + std::to_string(ell));
    FrobeniusModel fm;
    fm.ell = ell;
    long a = mpz_class(it->second % p).get_si();
    a = mod(a, p);
    long c = mulmod(powmod(ell, f.weight - 1, p), f.eps(ell), p);
    fm.g = {0, mod(-c, p), 1, a};
    long twist = mulmod(mod(ell, p), emb.value(psi, ell), p);
    Mat3 s = sym2_matrix(fm.g, p);
    for (int i = 0; i < 9; ++i) fm.A[i] = mulmod(s[i], twist, p);
    fm.t_prime = mulmod(c, twist, p);
    fm.regular_semisimple = mod(mulmod(a, a, p) - mulmod(4, c, p), p) != 0;
    Mat3 am = fm.A;
    for (int i = 0; i < 3; ++i) am[4 * i] = mod(am[4 * i] - 1, p);
    fm.rank = rank_mod_p(am, p);
    return fm;
}

PrimeScan prime_scan(long p, const HeckeData& f, const DirichletCharacter& psi, const ResidueEmbedding& emb,
                     long ell_max) {
    PrimeScan out;
    long level = f.level * psi.modulus();
    for (long ell = p + 1; ell <= ell_max; ell += p) {
        if (!is_prime(ell) || level % ell == 0) continue;
        ++out.examined;
        FrobeniusModel fm = frobenius_model(p, f, psi, emb, ell);
        if (!fm.regular_semisimple) {
            out.ambiguous.push_back(fm);
            continue;
        }
        if (fm.cyclic_cokernel() && fm.t_prime != 1) out.primes.push_back(fm);
    }
    return out;
}

bool verify_tau(long p, const Mat2& model, long psi_u) {
    Mat3 s = sym2_matrix(model, p);
    Mat3 am{};
    for (int i = 0; i < 9; ++i) am[i] = mulmod(s[i], psi_u, p);
    for (int i = 0; i < 3; ++i) am[4 * i] = mod(am[4 * i] - 1, p);
    long det = mod(mulmod(model[0], model[3], p) - mulmod(model[1], model[2], p), p);
    return rank_mod_p(am, p) == 2 && mulmod(det, psi_u, p) != 1;
}

TauWitness find_tau(long p, const DirichletCharacter& psi, const DirichletCharacter& eps, const ResidueEmbedding& emb) {
    long n = std::lcm(psi.modulus(), eps.modulus());
    for (long u = 2; u < std::max(n, 2L); ++u) {
        if (std::gcd(u, n) != 1) continue;
        TauWitness w;
        w.u = u;
        w.psi_u = emb.value(psi, u);
        w.eps_u = emb.value(eps, u);
        long ep = mulmod(w.psi_u, w.eps_u, p);
        if (ep == 1 || ep == p - 1) continue;
        long r = 0;
        for (long x = 1; x < p; ++x)
            if (mulmod(x, x, p) == w.psi_u) {
                r = x;
                break;
            }
        if (r == 0) continue;
        w.root = r;
        w.model = {mulmod(w.eps_u, r, p), 0, 0, invmod(r, p)};
        Mat3 s = sym2_matrix(w.model, p);
        for (int i = 0; i < 9; ++i) w.action[i] = mulmod(s[i], w.psi_u, p);
        w.t_prime = ep;
        if (!verify_tau(p, w.model, w.psi_u)) fail(ErrorKind::Inconsistency, "diagonal model failed verification");
        return w;
    }
    fail(ErrorKind::NoWitness, "no u with eps psi(u) != +-1 and psi(u) a square mod p");
}

namespace {

struct Mat3Hash {
    size_t operator()(const Mat3& m) const {
        size_t h = 0;
        for (long x : m) h = h * 1000003u + static_cast<size_t>(x);
        return h;
    }
};

Mat3 mat_mul(const Mat3& a, const Mat3& b, long p) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            long s = 0;
            for (int t = 0; t < 3; ++t) s += a[3 * i + t] * b[3 * t + j];
            c[3 * i + j] = mod(s, p);
        }
    return c;
}

}  // namespace

H1Result h1_brute_force(const std::vector<Mat3>& gens_in, long p, long max_order) {
    if (!is_prime(p) || p > 3037000499L) fail(ErrorKind::Domain, "h1_brute_force needs a small prime");
    std::vector<Mat3> gens;
    for (Mat3 g : gens_in) {
        for (auto& x : g) x = mod(x, p);
        gens.push_back(g);
    }
    Mat3 id{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const long P = 3 * (static_cast<long>(gens.size()) + 1);

    // f(x) as a 3 x P matrix in the parameters f(e), f(s_1), ...
    std::vector<Mat3> elems{id};
    std::vector<std::vector<long>> f{std::vector<long>(3 * P, 0)};
    for (int i = 0; i < 3; ++i) f[0][i * P + i] = 1;
    std::unordered_map<Mat3, long, Mat3Hash> index{{id, 0}};
    for (size_t q = 0; q < elems.size(); ++q) {
        for (size_t s = 0; s < gens.size(); ++s) {
            Mat3 x = mat_mul(elems[q], gens[s], p);
            if (index.count(x)) continue;
            if (static_cast<long>(elems.size()) >= max_order)
                fail(ErrorKind::GroupTooLarge, "group order exceeds " + std::to_string(max_order));
            // f(g s) = f(g) + g f(s), f(s) being the parameters of s
            std::vector<long> fx = f[q];
            const Mat3& g = elems[q];
            for (int i = 0; i < 3; ++i)
                for (int t = 0; t < 3; ++t) {
                    long col = 3 * (static_cast<long>(s) + 1) + t;
                    fx[i * P + col] = mod(fx[i * P + col] + g[3 * i + t], p);
                }
            index.emplace(x, static_cast<long>(elems.size()));
            elems.push_back(x);
            f.push_back(std::move(fx));
        }
    }
    const long n = static_cast<long>(elems.size());

    std::vector<std::vector<long>> fr(3 * gens.size(), std::vector<long>(3, 0));
    for (size_t s = 0; s < gens.size(); ++s)
        for (int i = 0; i < 3; ++i)
            for (int t = 0; t < 3; ++t) fr[3 * s + i][t] = mod(gens[s][3 * i + t] - (i == t), p);
    long fixed_dim = 3 - (gens.empty() ? 0 : rank_mod_p(fr, p));
    long b1 = 3 - fixed_dim;

    // Reduced echelon basis of the constraint rows, built incrementally.
    std::vector<std::vector<long>> basis;
    std::vector<long> pivots;
    auto insert = [&](std::vector<long> row) {
        for (size_t b = 0; b < basis.size(); ++b) {
            long c = row[pivots[b]];
            if (c == 0) continue;
            for (long t = 0; t < P; ++t) row[t] = mod(row[t] - mulmod(c, basis[b][t], p), p);
        }
        long piv = -1;
        for (long t = 0; t < P; ++t)
            if (row[t] != 0) {
                piv = t;
                break;
            }
        if (piv < 0) return;
        long inv = invmod(row[piv], p);
        for (auto& x : row) x = mulmod(x, inv, p);
        for (size_t b = 0; b < basis.size(); ++b) {
            long c = basis[b][piv];
            if (c == 0) continue;
            for (long t = 0; t < P; ++t) basis[b][t] = mod(basis[b][t] - mulmod(c, row[t], p), p);
        }
        basis.push_back(std::move(row));
        pivots.push_back(piv);
    };

    const long max_rank = P - b1;
    std::vector<long> row(P);
    for (long gi = 0; gi < n && static_cast<long>(basis.size()) < max_rank; ++gi) {
        const Mat3& g = elems[gi];
        for (long hi = 0; hi < n && static_cast<long>(basis.size()) < max_rank; ++hi) {
            long gh = index.at(mat_mul(g, elems[hi], p));
            for (int i = 0; i < 3; ++i) {
                for (long t = 0; t < P; ++t) {
                    long v = f[gh][i * P + t] - f[gi][i * P + t];
                    for (int r = 0; r < 3; ++r) v -= mulmod(g[3 * i + r], f[hi][r * P + t], p);
                    row[t] = mod(v, p);
                }
                insert(row);
            }
        }
    }
    H1Result out;
    out.group_order = n;
    out.cocycle_dim = P - static_cast<long>(basis.size());
    out.coboundary_dim = b1;
    out.dimension = out.cocycle_dim - b1;
    return out;
}

}  // namespace symsq
