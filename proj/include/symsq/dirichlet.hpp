#pragma once

// Dirichlet characters (Conrey labels), Gauss sums, generalised Bernoulli
// numbers, L-values with removed Euler factors, Kubota-Leopoldt values and
// the regular-prime test.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "symsq/ball.hpp"
#include "symsq/exact.hpp"
#include "symsq/padic.hpp"

namespace symsq {

class DirichletCharacter {
public:
    DirichletCharacter() : exps_{0} {}
    /// chi_N(i, .) in the Conrey numbering; i coprime to N.
    static DirichletCharacter conrey(long modulus, long index);
    static DirichletCharacter trivial(long modulus = 1) { return conrey(modulus, 1); }
    /// "N.i"
    static DirichletCharacter parse(const std::string& label);
    /// The unique character mod N with chi(g) = exp(2 pi i num/den); throws if none or several.
    static DirichletCharacter from_generator_value(long modulus, long g, long num, long den);

    long modulus() const { return modulus_; }
    long index() const { return index_; }
    long order() const { return order_; }
    long conductor() const { return conductor_; }
    /// chi(-1) as +1 or -1.
    int parity() const;
    bool is_trivial() const { return order_ == 1; }
    bool is_primitive() const { return conductor_ == modulus_; }
    std::string label() const;

    /// chi(a) = zeta_order^exponent(a); -1 when gcd(a, N) > 1.
    long exponent(long a) const;
    Cyclotomic value(long a) const;

    DirichletCharacter primitive() const;
    DirichletCharacter conj() const;
    DirichletCharacter pow(long e) const;
    /// Pointwise product of characters with the same modulus.
    DirichletCharacter operator*(const DirichletCharacter& rhs) const;
    bool operator==(const DirichletCharacter& rhs) const {
        return modulus_ == rhs.modulus_ && index_ == rhs.index_;
    }

    /// Rows "a,value" for 0 <= a < N.
    std::string table_csv() const;

private:
    long modulus_ = 1, index_ = 1, order_ = 1, conductor_ = 1;
    std::vector<long> exps_;
};

/// sum_{a mod N_chi} chi*(a) zeta_{N_chi}^a for the primitive chi* inducing chi (1 for the trivial character).
Cyclotomic gauss_sum(const DirichletCharacter& chi);

/// B_n(x) for rational x (B_1 = -1/2 convention).
mpq_class bernoulli_polynomial(unsigned n, const mpq_class& x);
/// N^{n-1} sum_{a=1}^{N} chi(a) B_n(a/N) with N the modulus of chi.
Cyclotomic gen_bernoulli(unsigned n, const DirichletCharacter& chi);

/// L(chi, s) prod_{l in strip} (1 - chi(l) l^{-s}) for Re s > 1, via
/// Hurwitz zeta values with a rigorous Euler-Maclaurin remainder.
BallComplex dirichlet_L_stripped(const DirichletCharacter& chi, const BallComplex& s, const std::vector<long>& strip,
                                 long digits);
BallComplex dirichlet_L_stripped(const DirichletCharacter& chi, long s, const std::vector<long>& strip, long digits);

/// Hurwitz zeta(s, a) for Re s > 1 and a > 0.
BallComplex hurwitz_zeta(const BallComplex& s, const BallReal& a, long digits);

struct KLValue {
    PadicNumber value;
    /// True when s itself is an interpolation point 1 - n.
    bool exact_point = false;
    /// Result is claimed modulo p^valid_exponent only (LONG_MAX for exact points).
    long valid_exponent = 0;
    /// Interpolation indices n used (s' = 1 - n).
    std::vector<long> indices;
};

/// (1 - chi(p) p^{n-1}) (-B_{n,chi}/n) at s = 1 - n. At other integers s the
/// value is transported from the congruent points n = 1 - s + m(p-1),
/// m = 1..points, by forward-difference extrapolation to m = 0, and is
/// claimed modulo p^points.
/// Character values must lie in Q(sqrt d) for the quadratic embedding.
KLValue kl_padic_value(const DirichletCharacter& chi, long s, const PadicEmbedding& emb, long points = 1);
KLValue kl_padic_value(const DirichletCharacter& chi, long s, const RootOfUnityEmbedding& emb, long points = 1);

struct RegularityResult {
    bool regular = true;
    /// Even k <= p - 3 with p | numerator(B_k).
    std::vector<long> irregular_indices;
};

/// B_k mod p for even 2 <= k <= p - 3 via the series of (t/2)coth(t/2) over F_p.
RegularityResult is_regular_prime(long p);

}  // namespace symsq
