#pragma once

// Symmetric-square L-functions of level-1 style eigenforms twisted by a
// Dirichlet character: local factors, Dirichlet coefficients, complex values
// (direct sum and smoothed functional equation), Petersson norms, normalised
// critical-value ratios, algebraic recognition and p-adic multipliers.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symsq/ball.hpp"
#include "symsq/dirichlet.hpp"
#include "symsq/exact.hpp"
#include "symsq/modforms.hpp"
#include "symsq/padic.hpp"

namespace symsq {

struct SymSqDescriptor {
    HeckeData f;
    DirichletCharacter chi;
    /// Primitive bad-prime factors are only supported where they agree with the
    /// naive ones (level 1), so the flag is rejected otherwise.
    bool primitive = false;
};

SymSqDescriptor make_descriptor(HeckeData f, DirichletCharacter chi, bool primitive = false);

/// (1 - alpha^2 chi X)(1 - alpha beta chi X)(1 - beta^2 chi X) written through
/// a_l and c = l^{k-1} eps(l); primes of bad reduction drop the beta terms.
ExactPoly euler_factor_symsq(const HeckeData& f, const DirichletCharacter& chi, long l);

struct FactorizationCheck {
    /// (1 - c psi(l) X) P_l(Sym^2 f x psi, X) inverts the Rankin-Selberg local series.
    bool product_matches = false;
    /// Trivial psi and good l: the product equals (1 - cX)^2 (1 - (a^2 - 2c)X + c^2 X^2).
    bool quartic_applicable = false;
    bool quartic_matches = false;
    ExactPoly rankin_factor;
    ExactPoly symsq_factor;
    bool ok() const { return product_matches && (!quartic_applicable || quartic_matches); }
};

/// Independent check against sum_r a_{l^r}^2 psi(l)^r X^r / (1 - psi(l)^2 c^2 X^2).
FactorizationCheck factorization_identity_check(const HeckeData& f, const DirichletCharacter& psi, long l);

/// b_0..b_{n_max} of L^imp(Sym^2 f, chi, s) = sum b_n n^{-s}:
/// b_n = sum_{m^2 r = n} (chi eps)^2(m) m^{2k-2} chi(r) a_{r^2}.
std::vector<Cyclotomic> symsq_dirichlet_coeffs(const HeckeData& f, const DirichletCharacter& chi, long n_max);

/// Partial sum over n <= n_max of a_{n^2} chi(n) n^{-s} times the stripped
/// L(chi^2 eps^2, 2s - 2k + 2). The tail uses d(m) <= sqrt(3m), which bounds
/// it by sqrt(3) n_max^{k+1-Re s} / (Re s - k - 1).
BallComplex L_direct(const SymSqDescriptor& desc, const BallComplex& s, long digits, long n_max);

struct AfeConfig {
    /// Gamma_R shifts in the unitary normalisation (centre 1/2).
    std::vector<long> mu;
    long conductor = 1;
    /// Root number; solved from the smoothing parameters when absent.
    std::optional<BallComplex> sign;
    std::vector<double> t_values{1.0, 1.15, 0.9};
    double contour_offset = 3.0;
    long max_terms = 6000;
};

/// mu = (1, k-1, k) for even chi and (0, k-1, k) for odd chi; conductor N_chi^3 (level 1 only).
AfeConfig default_afe_config(const SymSqDescriptor& desc);

struct AfeResult {
    BallComplex value;
    BallComplex sign;
    /// Largest relative disagreement between smoothing parameters.
    double residual = 0;
    long terms = 0;
};

/// L^imp(Sym^2 f, chi, s) for 0 < Re s < 2k - 1 from the smoothed functional
/// equation. Kernels are evaluated by a trapezoid rule on a vertical line;
/// truncation errors are estimated from the disagreement between smoothing
/// parameters, which is folded into the radius. Throws Inconsistency when the
/// disagreement exceeds 10^{-digits}.
AfeResult L_afe_detailed(const SymSqDescriptor& desc, const AfeConfig& cfg, const BallComplex& s, long digits);
BallComplex L_afe(const SymSqDescriptor& desc, const AfeConfig& cfg, const BallComplex& s, long digits);

/// Integral of |f|^2 y^{k-2} over the level-1 fundamental domain. The part
/// with y >= 1 is summed in closed form; the rest goes through integrate_2d.
BallReal petersson_norm(const QExpansion& f, long digits, QuadratureStats* stats = nullptr);

/// 2^{2k-1} pi^{k+1} / (k-1)! * <f, f>, the value of L(Sym^2 f, k) at level 1.
BallReal symsq_value_from_petersson(int k, const BallReal& petersson);

struct Criticality {
    bool critical = false;
    /// 0 for 1 <= s <= k-1, 1 for k <= s <= 2k-2.
    int delta = 0;
};

Criticality criticality(int k, int chi_parity, long s);

/// L / (pi^{k-1} <f,f>) * (G(chi^{-1} eps^{-1}) / (2 pi i)^{s-k+1})^{1+delta}.
BallComplex schmidt_ratio(const SymSqDescriptor& desc, long s, const BallComplex& L, const BallReal& petersson);

/// (s-1)! (s-k)! G(psi^{-1})^2 L / (2^{2s+1} pi^{2s-k+1} <f,f>).
BallComplex tilde_ratio(int k, const DirichletCharacter& psi, long s, const BallComplex& L, const BallReal& petersson);

struct TildeOptions {
    long digits = 18;
    long n_max = 10000;
};

struct TildeResult {
    BallComplex ratio;
    BallComplex L;
    BallReal petersson;
};

/// Weight-16 level-1 form twisted by the cubic character 7.2 at even 18 <= s <= 30.
TildeResult tilde_ratio_w16(long s, const TildeOptions& opt = {});

/// Integer LLL reduction of the rows of `basis` (delta = 3/4).
std::vector<std::vector<mpz_class>> lll_reduce(std::vector<std::vector<mpz_class>> basis);

/// (a + b sqrt d)/c with |a|, |b|, |c| <= height_bound re-embedding within ten
/// times the radius of z, or nothing.
std::optional<QuadraticNumber> recognize_quadratic(const BallComplex& z, long d, const mpz_class& height_bound);

/// Embedding of cyclotomic values into Q_p used by the multipliers.
using CyclotomicEmbedder = std::function<PadicNumber(const Cyclotomic&)>;

struct OrdinaryRoots {
    PadicNumber alpha;  ///< unit root of X^2 - a_p X + p^{k-1} eps(p)
    PadicNumber beta;
};

/// Throws NonOrdinary when p | a_p.
OrdinaryRoots ordinary_roots(const mpz_class& a_p, long p, int k, long precision);

enum class MultiplierKind { E, EPrime };

struct InterpMultiplier {
    MultiplierKind kind = MultiplierKind::E;
    long s = 0;
    long conductor_exponent = 0;
    PadicNumber value;
    bool vanishes = false;
};

/// E_p(s, chi) or E'_p(s, chi) for chi of conductor p^r. Factors with an
/// exact root-of-unity cancellation become exact zeros.
InterpMultiplier interp_multiplier(MultiplierKind kind, long s, long conductor_exponent, int k, long p,
                                   const OrdinaryRoots& roots, const Cyclotomic& psi_p, const Cyclotomic& eps_p,
                                   const CyclotomicEmbedder& embed);

struct PadicLValue {
    PadicNumber value;
    PadicNumber multiplier;
    PadicNumber ratio;
    long valuation = 0;
    bool unit = false;
};

/// E'_p(s, 1) times the embedded algebraic ratio. The Gauss-sum square carried
/// by the ratio is a p-adic unit for p prime to the character conductor and is
/// left in place.
PadicLValue padic_symsq_L_value(long s, const QuadraticNumber& ratio, const PadicEmbedding& emb, int k,
                                const mpz_class& a_p, const DirichletCharacter& psi);

/// (-1)^s (c^2 - c^{2s-2k+2} chi(c)^2 (psi eps)(c)^{-2}) G(psi^{-1})^2 G(eps^{-1})^2.
Cyclotomic reciprocity_multiplier(long s, long c, const DirichletCharacter& psi, const DirichletCharacter& eps, int k,
                                  const DirichletCharacter& chi);

}  // namespace symsq
