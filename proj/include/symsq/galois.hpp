#pragma once

// Galois-side bookkeeping for Sym^2 f (1 + psi): ordinary filtration
// characters, classification of points j + chi, Selmer bookkeeping and
// finite (mod p) checks behind the Euler system argument. Statements over
// Z_p or infinite extensions are only certified through their mod-p shadows.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "symsq/dirichlet.hpp"
#include "symsq/modforms.hpp"
#include "symsq/padic.hpp"
#include "symsq/symsq.hpp"

namespace symsq {

/// kappa^r x unram(lambda).
struct GradedCharacter {
    int cyclotomic_exponent = 0;
    PadicNumber frobenius;
    /// log_p |lambda|_infinity; nonzero forces H^0 over Q_{p,infinity} to vanish.
    long archimedean_weight = 0;
    bool h0_vanishes = true;
};

/// Gr^0, Gr^1, Gr^2 of the ordinary filtration of Sym^2 M(f)^*(1 + psi).
std::array<GradedCharacter, 3> graded_characters(int k, long p, const OrdinaryRoots& roots, const Cyclotomic& psi_p,
                                                 const Cyclotomic& eps_p, const CyclotomicEmbedder& embed);

/// Reduction of character values modulo a degree-one prime above p: zeta_m -> zeta.
struct ResidueEmbedding {
    long p = 0;
    long m = 1;
    long zeta = 1;
    /// chi(a) mod p, 0 when gcd(a, N) > 1. Requires order(chi) | m.
    long value(const DirichletCharacter& chi, long a) const;
};

/// zeta_m -> g^{(p-1)/m} with g the least primitive root (matches make_root_embedding).
ResidueEmbedding make_residue_embedding(long p, long m);
ResidueEmbedding residue_embedding(const RootOfUnityEmbedding& emb);

struct PointInput {
    int k = 0;
    long p = 0;
    long j = 0;
    /// Finite-order character of Gamma, given as a character of p-power modulus.
    DirichletCharacter chi;
    DirichletCharacter psi;
    /// Nebentypus, modulus N_f.
    DirichletCharacter eps;
    long c_bound = 1000;
};

struct PointClassification {
    bool critical = false;
    int delta = 0;
    /// 0, 1, 2, 3 for j <= 0, [1, k-1], [k, 2k-2], >= 2k-1.
    int m = 0;
    bool e_vanishes = false;
    bool eprime_vanishes = false;
    bool exceptional = false;
    /// Set only for k <= j <= 2k-2 with (-1)^j chi(-1) = psi(-1).
    std::optional<bool> unfortunate;
    long c_witness = 0;
    std::string obstruction;
    /// j = k, chi = 1, eps psi = 1: the zero of the c-factor cancels the pole.
    bool pole_cancelled = false;
    /// Nonvanishing of L_p(eps psi, j - k + 1 + chi) is assumed rather than known.
    bool schneider_caveat = false;
};

PointClassification classify_point(const PointInput& in);

/// Multiplicity bookkeeping for the Greenberg Selmer ranks (table transcription):
/// 2 - i when eta(-1) = psi(-1), 1 - i otherwise.
int rank_table(int i, bool same_parity);

/// p^{c n} / h0; throws Divisibility when h0 does not divide p^{c n}.
mpz_class predict_selmer_order(long p, long n, long c, const mpz_class& h0);

/// Primes where the residual image is known not to be big, weight 16 level 1.
std::vector<long> weight16_exceptional_primes();

struct HypothesisVerdict {
    std::string name;
    bool pass = false;
    std::string witness;
};

struct HypothesisReport {
    std::vector<HypothesisVerdict> verdicts;
    /// Smallest admissible u, 0 if none.
    long u = 0;
    bool all_pass() const;
    const HypothesisVerdict& operator[](const std::string& name) const;
};

/// Names: "p>=7", "degree-one prime", "big image", "p prime to level",
/// "u exists", "eps psi(p) != 1".
HypothesisReport hypothesis_check(long p, const DirichletCharacter& psi, const DirichletCharacter& eps,
                                  const std::vector<long>& exceptional_primes);

using Mat2 = std::array<long, 4>;
using Mat3 = std::array<long, 9>;

/// Action on the basis e1^2, e1 e2, e2^2, row-major, entries mod p.
Mat3 sym2_matrix(const Mat2& g, long p);
long rank_mod_p(std::vector<std::vector<long>> rows, long p);
long rank_mod_p(const Mat3& a, long p);

struct FrobeniusModel {
    long ell = 0;
    /// Companion matrix of X^2 - a_l X + l^{k-1} eps(l), mod p.
    Mat2 g{};
    /// l psi(l) Sym^2(g) mod p, the action on T/pT.
    Mat3 A{};
    /// eps psi(l) l^k mod p, the action on T'/pT'.
    long t_prime = 0;
    bool regular_semisimple = false;
    long rank = 0;
    bool cyclic_cokernel() const { return rank >= 2; }
};

FrobeniusModel frobenius_model(long p, const HeckeData& f, const DirichletCharacter& psi, const ResidueEmbedding& emb,
                               long ell);

struct PrimeScan {
    std::vector<FrobeniusModel> primes;
    /// l = 1 mod p with repeated Hecke roots mod p; never classified.
    std::vector<FrobeniusModel> ambiguous;
    long examined = 0;
};

/// Primes l <= l_max, l = 1 mod p, prime to p N_f N_psi, with cyclic cokernel
/// of Frob_l - 1 on T/pT and Frob_l - 1 invertible on T'/pT'.
PrimeScan prime_scan(long p, const HeckeData& f, const DirichletCharacter& psi, const ResidueEmbedding& emb,
                     long ell_max);

struct TauWitness {
    long u = 0;
    long psi_u = 0;
    long eps_u = 0;
    /// r with r^2 = psi(u) mod p.
    long root = 0;
    /// diag(eps(u) r, r^{-1}) acting on M^*.
    Mat2 model{};
    Mat3 action{};
    long t_prime = 0;
};

/// psi(u) Sym^2(model) - 1 has corank one and det(model) psi(u) != 1 mod p.
bool verify_tau(long p, const Mat2& model, long psi_u);

/// Smallest u in (Z/N_f N_psi)^x with eps psi(u) != +-1 and psi(u) a square mod p; throws NoWitness.
TauWitness find_tau(long p, const DirichletCharacter& psi, const DirichletCharacter& eps, const ResidueEmbedding& emb);

struct H1Result {
    long dimension = 0;
    long group_order = 0;
    long cocycle_dim = 0;
    long coboundary_dim = 0;
};

/// dim H^1(G, F_p^3) for G generated by `gens`, from the full cocycle system
/// f(gh) = f(g) + g f(h). Throws GroupTooLarge if |G| > max_order.
H1Result h1_brute_force(const std::vector<Mat3>& gens, long p, long max_order = 10000);

}  // namespace symsq
