#pragma once

// Run configuration, JSON report assembly and the end-to-end reproduction
// pipeline shared by the command-line tool and the acceptance runner.

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "symsq/galois.hpp"
#include "symsq/symsq.hpp"

namespace symsq::cli {

using Json = nlohmann::ordered_json;

/// Degree-one prime of Q(sqrt d) above p, generated by a + b sqrt(d).
struct PrimeSpec {
    long p = 0;
    mpz_class gen_a, gen_b;
};

struct RunConfig {
    int weight = 16;
    long level = 1;
    /// CSV of coefficients; empty means the built-in level-1 eigenform.
    std::string form_path;
    long coefficients = 10000;
    std::string char_label = "7.2";
    /// Alternative "N:g=zetaM^e" description; wins over char_label when set.
    std::string char_gen;
    long s = 22;
    long quad_d = -3;
    std::vector<PrimeSpec> primes{{37, 5, -2}, {67, 8, 1}, {439, 14, 9}};
    long complex_digits = 18;
    long padic_precision = 12;
    std::string method = "both";
    long n_max = 10000;
    mpz_class congruence_ideal = 3617;
    long scan_limit = 10000;
    mpz_class height_bound = mpz_class("10000000000000000000000000");
    std::string output;
};

/// Flat "key = value" keys, as documented in the README.
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);
RunConfig load_config(const std::string& path, RunConfig base = {});
/// Throws Usage on any inconsistent field.
void validate(const RunConfig& cfg);
Json config_json(const RunConfig& cfg);

/// "N:g=zetaM", "N:g=zetaM^e", "N:g=-1" or "N:g=1".
DirichletCharacter parse_char_gen(const std::string& text);
DirichletCharacter resolve_character(const RunConfig& cfg);
std::vector<PrimeSpec> parse_primes(const std::string& text);

Json value_record(const BallComplex& z, const std::string& method, int digits = 25);
Json value_record(const BallReal& x, const std::string& method, int digits = 25);

/// One comparison between a stored expected value and a computed one.
Json comparison(const std::string& name, const std::string& expected, const std::string& computed,
                const std::string& status, const std::string& tolerance = "exact", const std::string& source = "");

/// Sections carry "status": ok, mismatch, error or skipped.
struct Report {
    Json root;
    explicit Report(const std::string& command);
    void add(Json section);
    /// 0 success, 1 computation failure, 3 golden mismatch.
    int exit_code() const;
    /// Serialised JSON; timing fields are the only nondeterministic part.
    std::string dump() const;
};

/// Shared state passed between sections.
struct Pipeline {
    RunConfig cfg;
    QExpansion form;
    HeckeData hecke;
    DirichletCharacter psi;
    /// The built-in weight 16 form with the cubic character mod 7 at s = 22.
    bool fixtures_apply = false;
    std::optional<BallReal> petersson;
    std::optional<BallComplex> L;
    std::optional<BallComplex> ratio;
    std::optional<QuadraticNumber> algebraic;
};

Pipeline make_pipeline(const RunConfig& cfg);

/// Each runs one stage, catching module errors into the section.
Json section_eigenform(Pipeline& pl);
Json section_petersson(Pipeline& pl);
Json section_lvalue(Pipeline& pl, const BallComplex& s, const std::string& method, long digits);
Json section_ratio(Pipeline& pl);
Json section_factor_audit(Pipeline& pl);
Json section_padic(Pipeline& pl, const PrimeSpec& prime);
Json section_classification(Pipeline& pl);
Json section_prime_scan(Pipeline& pl, const PrimeSpec& prime);
Json section_hypotheses(Pipeline& pl);

Report run_reproduce(const RunConfig& cfg);

/// Stored expected values (digit strings as published) and their tolerances.
namespace golden {
extern const char* const petersson;
extern const char* const petersson_tolerance;
extern const char* const ratio_a;
extern const char* const ratio_b;
extern const char* const ratio_den;
extern const char* const large_prime;
extern const char* const source;
QuadraticNumber ratio22();
}  // namespace golden

}  // namespace symsq::cli
