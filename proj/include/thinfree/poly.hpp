// Sparse multivariate polynomials with exact small-integer behaviour.
//
// Polynomials are stored as a map from exponent tuples to double
// coefficients.  All arithmetic is termwise and deterministic: terms are
// kept in lexicographic exponent order and evaluation sums in that order,
// so results are bit-reproducible and exact whenever coefficients and
// sample points are small integers.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace thinfree {

/// Thrown by parse_poly; `pos` is the byte offset of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what), pos_(pos) {}
    std::size_t pos() const { return pos_; }

private:
    std::size_t pos_;
};

class Polynomial {
public:
    using Exponents = std::vector<int>;
    using TermMap = std::map<Exponents, double>;

    Polynomial() : dim_(0) {}
    explicit Polynomial(int dim);
    Polynomial(int dim, TermMap terms);

    static Polynomial constant(int dim, double value);
    static Polynomial variable(int dim, int index);  // index is 1-based

    int dim() const { return dim_; }
    const TermMap& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    /// Total degree; -1 for the zero polynomial.
    int degree() const;

    /// Coefficient for an exponent tuple (0 when absent).
    double coeff(const Exponents& e) const;
    double max_abs_coeff() const;

    /// Largest |coefficient| scaled tolerance used for symbolic "= 0" checks.
    double zero_tolerance() const;
    bool is_zero() const;

    double eval(const std::vector<double>& x) const;

    /// True if every term has even total degree in variable `index` (1-based).
    bool even_in(int index) const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(const Polynomial& rhs);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

    Polynomial pow(unsigned n) const;

    /// Partial derivative in variable `index` (1-based).
    Polynomial derivative(int index) const;

    /// Substitute x -> s*x (every coordinate scaled by the same factor).
    Polynomial scale_argument(double s) const;

    /// Embed into a higher dimension; existing variables keep their indices.
    Polynomial lift(int new_dim) const;

    /// Restrict to the hyperplane {x_dim = 0}: terms with a positive
    /// exponent in the last variable vanish, the rest lose that slot.
    Polynomial restrict_plane() const;

    /// Homogeneous part of the given total degree.
    Polynomial homogeneous_part(int deg) const;

private:
    void insert_term(const Exponents& e, double c);
    void check_dim(const Polynomial& rhs) const;

    int dim_;
    TermMap terms_;
};

/// Grammar:  expr := ['+'|'-'] term (('+'|'-') term)*
///           term := factor ('*' factor)*
///           factor := number | var | '(' expr ')' | factor '^' uint
///           var := 'x' uint          (1-based, index <= dim)
/// Number literals may be integral, decimal, or scientific.
Polynomial parse_poly(const std::string& text, int dim);

/// Inverse of parse_poly up to floating-point round-trip of coefficients.
std::string print_poly(const Polynomial& p);

double eval_poly(const Polynomial& p, const std::vector<double>& x);

Polynomial laplacian_poly(const Polynomial& p);

enum class Parity { Even, Odd };

/// Harmonic lift of a polynomial on the thin plane to one extra dimension.
///
/// Even:  P(x', z) = sum_j (-1)^j z^(2j) / (2j)!     * Lap'^j p
/// Odd:   Q(x', z) = sum_j (-1)^j z^(2j+1) / (2j+1)! * Lap'^j p
///
/// Both sums are finite.  Even extensions are harmonic; odd extensions Q
/// satisfy Delta Q = 0 as well, with Q(x',0) = 0 and dQ/dz(x',0) = p.
Polynomial harmonic_extension(const Polynomial& p, Parity parity);

enum class Negativity { Bounded, Unbounded, Unknown };

struct ClassVerdict {
    Negativity status = Negativity::Unknown;
    /// For Bounded: all sampled points outside this radius were nonnegative.
    double radius = 0.0;
    /// For Unbounded: a sampled point with negative value and large norm.
    std::optional<std::vector<double>> witness;
    /// True when the certificate follows from a strictly positive leading
    /// form; otherwise it is only as strong as the direction sample.
    bool leading_form_definite = false;
};

struct NegativityOptions {
    int budget = 512;           // direction sample size (axes are always added)
    double sample_radius = 4.0; // initial probe scale along rays
};

/// Decide whether { p < 0 } has compact closure, by direction sampling.
/// Never reports Bounded if any sampled point outside `radius` is negative.
ClassVerdict negativity_bounded(const Polynomial& p, const NegativityOptions& opt = {});

/// The obstacle family 1 - ((f + 1)/(1 - delta))^(2k), composed exactly.
/// Requires delta in (0,1) and k >= 1.
Polynomial build_p2k(const Polynomial& f, double delta, int k);

/// Scalar evaluation of the same composition; stable for large k where the
/// expanded polynomial would be ill-conditioned.  Overflow clamps to -inf.
double p2k_value(double f_value, double delta, int k);

struct FitResult {
    Polynomial poly;
    double max_residual = 0.0;
    int degree_used = 0;
};

/// Least-squares fit in the monomial basis of total degree <= degree,
/// by ridge-regularised normal equations.  If the system is numerically
/// rank deficient the degree is reduced and the result reports it.
FitResult fit_distance_poly(const std::vector<std::vector<double>>& points,
                            const std::vector<double>& values, int degree);

}  // namespace thinfree
