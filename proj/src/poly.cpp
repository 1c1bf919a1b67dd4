#include "thinfree/poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace thinfree {

namespace {

// Binary exponentiation; exact for integer bases while products stay in range.
double ipow(double base, int n) {
    double r = 1.0, b = base;
    for (unsigned e = static_cast<unsigned>(n); e; e >>= 1) {
        if (e & 1u) r *= b;
        b *= b;
    }
    return r;
}

void shortest_repr(double v, char* buf, std::size_t cap) {
    auto res = std::to_chars(buf, buf + cap, v);
    *res.ptr = '\0';
}

}  // namespace

Polynomial::Polynomial(int dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("polynomial dimension must be >= 0");
}

Polynomial::Polynomial(int dim, TermMap terms) : Polynomial(dim) {
    for (auto& [e, c] : terms) {
        if (static_cast<int>(e.size()) != dim)
            throw std::invalid_argument("exponent tuple length does not match dimension");
        for (int v : e)
            if (v < 0) throw std::invalid_argument("negative exponent");
        if (c != 0.0) terms_.emplace(e, c);
    }
}

Polynomial Polynomial::constant(int dim, double value) {
    Polynomial p(dim);
    if (value != 0.0) p.terms_.emplace(Exponents(dim, 0), value);
    return p;
}

Polynomial Polynomial::variable(int dim, int index) {
    if (index < 1 || index > dim) throw std::invalid_argument("variable index out of range");
    Polynomial p(dim);
    Exponents e(dim, 0);
    e[index - 1] = 1;
    p.terms_.emplace(e, 1.0);
    return p;
}

int Polynomial::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
        int t = 0;
        for (int v : e) t += v;
        d = std::max(d, t);
    }
    return d;
}

double Polynomial::coeff(const Exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

double Polynomial::zero_tolerance() const {
    return 1e-9 * (1.0 + max_abs_coeff());
}

bool Polynomial::is_zero() const {
    const double tol = zero_tolerance();
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > tol) return false;
    return true;
}

double Polynomial::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw std::invalid_argument("evaluation point has wrong dimension");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int v = 0; v < dim_; ++v)
            if (e[v]) t *= ipow(x[v], e[v]);
        sum += t;
    }
    return sum;
}

bool Polynomial::even_in(int index) const {
    for (const auto& [e, c] : terms_)
        if (e[index - 1] % 2 != 0) return false;
    return true;
}

void Polynomial::insert_term(const Exponents& e, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

void Polynomial::check_dim(const Polynomial& rhs) const {
    if (dim_ != rhs.dim_) throw std::invalid_argument("polynomial dimension mismatch");
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    check_dim(rhs);
    for (const auto& [e, c] : rhs.terms_) insert_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    check_dim(rhs);
    for (const auto& [e, c] : rhs.terms_) insert_term(e, -c);
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
    check_dim(rhs);
    Polynomial out(dim_);
    Exponents e(dim_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            for (int v = 0; v < dim_; ++v) e[v] = ea[v] + eb[v];
            out.insert_term(e, ca * cb);
        }
    }
    terms_ = std::move(out.terms_);
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

Polynomial Polynomial::pow(unsigned n) const {
    if (n > 4096) throw std::invalid_argument("polynomial exponent too large");
    Polynomial r = constant(dim_, 1.0);
    Polynomial b = *this;
    while (n) {
        if (n & 1u) r *= b;
        if (n >>= 1) b *= b;
    }
    return r;
}

Polynomial Polynomial::derivative(int index) const {
    if (index < 1 || index > dim_) throw std::invalid_argument("variable index out of range");
    Polynomial out(dim_);
    const int v = index - 1;
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) continue;
        Exponents d = e;
        d[v] -= 1;
        out.insert_term(d, c * e[v]);
    }
    return out;
}

Polynomial Polynomial::scale_argument(double s) const {
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
        int total = 0;
        for (int v : e) total += v;
        out.insert_term(e, c * ipow(s, total));
    }
    return out;
}

Polynomial Polynomial::lift(int new_dim) const {
    if (new_dim < dim_) throw std::invalid_argument("lift cannot reduce dimension");
    Polynomial out(new_dim);
    for (const auto& [e, c] : terms_) {
        Exponents le(new_dim, 0);
        std::copy(e.begin(), e.end(), le.begin());
        out.insert_term(le, c);
    }
    return out;
}

Polynomial Polynomial::restrict_plane() const {
    if (dim_ == 0) return *this;
    Polynomial out(dim_ - 1);
    for (const auto& [e, c] : terms_) {
        if (e[dim_ - 1] != 0) continue;  // vanishes on the plane
        Exponents re(e.begin(), e.end() - 1);
        out.insert_term(re, c);
    }
    return out;
}

Polynomial Polynomial::homogeneous_part(int deg) const {
    Polynomial out(dim_);
    for (const auto& [e, c] : terms_) {
        int total = 0;
        for (int v : e) total += v;
        if (total == deg) out.insert_term(e, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// parsing / printing

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    Polynomial run() {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(pos_), pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    Polynomial expr() {
        bool neg = false;
        skip_ws();
        if (accept('-')) neg = true;
        else accept('+');
        Polynomial p = term();
        if (neg) p *= -1.0;
        for (;;) {
            if (accept('+')) p += term();
            else if (accept('-')) p -= term();
            else return p;
        }
    }

    Polynomial term() {
        Polynomial p = factor();
        while (accept('*')) p *= factor();
        return p;
    }

    Polynomial factor() {
        Polynomial p = primary();
        while (accept('^')) p = p.pow(parse_uint());
        return p;
    }

    Polynomial primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial p = expr();
            if (!accept(')')) fail("expected ')'");
            return p;
        }
        if (c == 'x') {
            ++pos_;
            const unsigned idx = parse_uint();
            if (idx < 1 || static_cast<int>(idx) > dim_) {
                pos_ -= 1;  // point at the index
                fail("variable index out of range for dimension " + std::to_string(dim_));
            }
            return Polynomial::variable(dim_, static_cast<int>(idx));
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        fail(std::string("unexpected character '") + c + "'");
    }

    unsigned parse_uint() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected an unsigned integer");
        unsigned v = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc()) fail("integer literal out of range");
        return v;
    }

    Polynomial number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            std::size_t digits = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (pos_ == digits) pos_ = mark;  // not an exponent after all
        }
        double v = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) fail("bad number literal");
        return Polynomial::constant(dim_, v);
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(const std::string& text, int dim) {
    if (dim < 1) throw std::invalid_argument("parse_poly requires dim >= 1");
    return Parser(text, dim).run();
}

std::string print_poly(const Polynomial& p) {
    if (p.empty()) return "0";
    std::string out;
    char buf[64];
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
        double mag = std::abs(c);
        const bool neg = std::signbit(c) && c != 0.0;
        if (first) {
            if (neg) out += "-";
            first = false;
        } else {
            out += neg ? " - " : " + ";
        }
        bool has_vars = false;
        for (int v : e)
            if (v) has_vars = true;
        if (!has_vars || mag != 1.0) {
            shortest_repr(mag, buf, sizeof buf);
            out += buf;
            if (has_vars) out += "*";
        }
        bool inner_first = true;
        for (int v = 0; v < p.dim(); ++v) {
            if (!e[v]) continue;
            if (!inner_first) out += "*";
            inner_first = false;
            out += "x" + std::to_string(v + 1);
            if (e[v] > 1) out += "^" + std::to_string(e[v]);
        }
    }
    return out;
}

double eval_poly(const Polynomial& p, const std::vector<double>& x) { return p.eval(x); }

Polynomial laplacian_poly(const Polynomial& p) {
    Polynomial::TermMap acc;
    Polynomial::Exponents d;
    for (const auto& [e, c] : p.terms()) {
        for (int v = 0; v < p.dim(); ++v) {
            if (e[v] < 2) continue;
            d = e;
            d[v] -= 2;
            acc[d] += c * e[v] * (e[v] - 1);
        }
    }
    return Polynomial(p.dim(), std::move(acc));
}

Polynomial harmonic_extension(const Polynomial& p, Parity parity) {
    const int n = p.dim();
    const int zvar = n + 1;
    Polynomial out(n + 1);
    Polynomial iter = p;  // Lap'^j p, still in dimension n
    double factorial = 1.0;
    int sign = 1;
    for (int j = 0; !iter.empty(); ++j) {
        const int zpow = (parity == Parity::Even) ? 2 * j : 2 * j + 1;
        if (j > 0) {
            // grow (2j)! or (2j+1)! from the previous factorial
            factorial *= (parity == Parity::Even) ? (2.0 * j) * (2.0 * j - 1.0)
                                                  : (2.0 * j + 1.0) * (2.0 * j);
        } else if (parity == Parity::Odd) {
            factorial = 1.0;  // 1!
        }
        Polynomial zterm = iter.lift(n + 1);
        Polynomial::Exponents ze(n + 1, 0);
        ze[zvar - 1] = zpow;
        zterm *= Polynomial(n + 1, {{ze, 1.0}});
        zterm *= sign / factorial;
        out += zterm;
        iter = laplacian_poly(iter);
        sign = -sign;
    }
    return out;
}

// ---------------------------------------------------------------------------
// negativity classification

namespace {

// Deterministic unit directions: uniform angles in 2-D, a Fibonacci lattice
// in 3-D, and a seeded Gaussian sample above that.  Axis directions are
// always included so axis-degenerate leading forms are probed.
std::vector<std::vector<double>> direction_sample(int dim, int budget) {
    std::vector<std::vector<double>> dirs;
    for (int v = 0; v < dim; ++v) {
        for (double s : {1.0, -1.0}) {
            std::vector<double> d(dim, 0.0);
            d[v] = s;
            dirs.push_back(d);
        }
    }
    if (dim == 1) return dirs;
    if (dim == 2) {
        for (int i = 0; i < budget; ++i) {
            double a = 2.0 * M_PI * (i + 0.5) / budget;
            dirs.push_back({std::cos(a), std::sin(a)});
        }
    } else if (dim == 3) {
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int i = 0; i < budget; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / budget;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double a = 2.0 * M_PI * i / golden;
            dirs.push_back({r * std::cos(a), r * std::sin(a), z});
        }
    } else {
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        auto next = [&state]() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return static_cast<double>(state >> 11) / 9007199254740992.0;
        };
        for (int i = 0; i < budget; ++i) {
            std::vector<double> d(dim);
            double norm2 = 0.0;
            for (int v = 0; v < dim; ++v) {
                double u1 = std::max(next(), 1e-12), u2 = next();
                d[v] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
                norm2 += d[v] * d[v];
            }
            double inv = 1.0 / std::sqrt(std::max(norm2, 1e-300));
            for (double& v : d) v *= inv;
            dirs.push_back(d);
        }
    }
    return dirs;
}

// Coefficients of the univariate restriction r -> p(r * theta), by degree.
std::vector<double> ray_coefficients(const Polynomial& p, const std::vector<double>& theta) {
    std::vector<double> c(static_cast<std::size_t>(std::max(0, p.degree())) + 1, 0.0);
    for (const auto& [e, coeff] : p.terms()) {
        double v = coeff;
        int total = 0;
        for (int i = 0; i < p.dim(); ++i) {
            for (int k = 0; k < e[i]; ++k) v *= theta[i];
            total += e[i];
        }
        c[total] += v;
    }
    return c;
}

double ray_value(const std::vector<double>& c, double r) {
    double v = 0.0;  // Horner
    for (std::size_t i = c.size(); i-- > 0;) v = v * r + c[i];
    return v;
}

}  // namespace

ClassVerdict negativity_bounded(const Polynomial& p, const NegativityOptions& opt) {
    ClassVerdict verdict;
    const int dim = p.dim();
    const int deg = p.degree();
    const double scale = 1.0 + p.max_abs_coeff();
    const double tiny = 1e-12 * scale;

    if (deg <= 0) {  // constants (and the zero polynomial)
        double c0 = p.coeff(Polynomial::Exponents(dim, 0));
        if (c0 < 0.0) {
            verdict.status = Negativity::Unbounded;
            std::vector<double> w(dim, 0.0);
            if (dim > 0) w[0] = 2.0 * opt.sample_radius;
            verdict.witness = w;
        } else {
            verdict.status = Negativity::Bounded;
            verdict.radius = 0.0;
            verdict.leading_form_definite = true;
        }
        return verdict;
    }

    const auto dirs = direction_sample(dim, opt.budget);
    const Polynomial lead = p.homogeneous_part(deg);

    double lead_min = std::numeric_limits<double>::infinity();
    double radius = 1.0;
    bool all_rays_positive = true;

    for (const auto& theta : dirs) {
        lead_min = std::min(lead_min, lead.eval(theta));
        const auto c = ray_coefficients(p, theta);
        int top = static_cast<int>(c.size()) - 1;
        while (top >= 0 && std::abs(c[top]) <= tiny) --top;
        if (top < 0) continue;  // restriction vanishes on this ray
        if (c[top] < 0.0) {
            // eventually negative: confirm with growing samples
            double r = opt.sample_radius;
            int negatives = 0;
            for (int i = 0; i < 60 && negatives < 3; ++i, r *= 2.0) {
                if (ray_value(c, r) < 0.0) ++negatives;
                else negatives = 0;
            }
            if (negatives >= 3) {
                verdict.status = Negativity::Unbounded;
                std::vector<double> w(theta);
                for (double& v : w) v *= r / 2.0;
                verdict.witness = w;
                return verdict;
            }
            all_rays_positive = false;
            continue;
        }
        // eventually positive: locate the last sampled sign change
        double onset = 0.0;
        for (int i = 0; i <= 256; ++i) {
            double r = opt.sample_radius * i / 256.0;
            if (ray_value(c, r) < 0.0) onset = r;
        }
        for (double r = opt.sample_radius; r <= 1048576.0; r *= 2.0) {
            if (ray_value(c, r) < 0.0) onset = r;
        }
        radius = std::max(radius, 2.0 * onset);
    }

    if (!all_rays_positive) {
        verdict.status = Negativity::Unknown;
        return verdict;
    }

    // shell verification: the Bounded claim is only as strong as this sample
    for (double mult : {1.0, 1.5, 2.0, 4.0}) {
        for (const auto& theta : dirs) {
            std::vector<double> x(theta);
            for (double& v : x) v *= radius * mult;
            if (p.eval(x) < -tiny) {
                verdict.status = Negativity::Unknown;
                return verdict;
            }
        }
    }

    verdict.status = Negativity::Bounded;
    verdict.radius = radius;
    verdict.leading_form_definite = lead_min > tiny;
    return verdict;
}

Polynomial build_p2k(const Polynomial& f, double delta, int k) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    Polynomial g = f + Polynomial::constant(f.dim(), 1.0);
    g *= 1.0 / (1.0 - delta);
    return Polynomial::constant(f.dim(), 1.0) - g.pow(static_cast<unsigned>(2 * k));
}

double p2k_value(double f_value, double delta, int k) {
    const double y = (f_value + 1.0) / (1.0 - delta);
    return 1.0 - std::pow(y, 2.0 * k);
}

// ---------------------------------------------------------------------------
// least-squares fitting

namespace {

void enumerate_exponents(int dim, int max_deg, Polynomial::Exponents& cur, int var,
                         int used, std::vector<Polynomial::Exponents>& out) {
    if (var == dim) {
        out.push_back(cur);
        return;
    }
    for (int e = 0; e + used <= max_deg; ++e) {
        cur[var] = e;
        enumerate_exponents(dim, max_deg, cur, var + 1, used + e, out);
    }
    cur[var] = 0;
}

}  // namespace

FitResult fit_distance_poly(const std::vector<std::vector<double>>& points,
                            const std::vector<double>& values, int degree) {
    if (points.empty() || points.size() != values.size())
        throw std::invalid_argument("fit needs matching nonempty samples");
    const int dim = static_cast<int>(points.front().size());
    if (degree < 0) throw std::invalid_argument("fit degree must be >= 0");

    for (int deg = degree; deg >= 0; --deg) {
        std::vector<Polynomial::Exponents> basis;
        Polynomial::Exponents cur(dim, 0);
        enumerate_exponents(dim, deg, cur, 0, 0, basis);
        const int m = static_cast<int>(basis.size());
        const int np = static_cast<int>(points.size());
        if (m > np) continue;  // underdetermined, reduce

        Eigen::MatrixXd A(np, m);
        for (int r = 0; r < np; ++r)
            for (int c = 0; c < m; ++c) {
                double v = 1.0;
                for (int d = 0; d < dim; ++d)
                    for (int k = 0; k < basis[c][d]; ++k) v *= points[r][d];
                A(r, c) = v;
            }
        Eigen::Map<const Eigen::VectorXd> b(values.data(), np);

        // Least squares followed by Lawson reweighting: emphasising large
        // residuals drives the solution toward the Chebyshev fit, which is
        // what a max-residual report calls for.  Keep the best iterate.
        Eigen::VectorXd w = Eigen::VectorXd::Ones(np);
        Eigen::VectorXd best;
        double best_max = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 40; ++it) {
            const Eigen::VectorXd sw = w.cwiseSqrt();
            const Eigen::MatrixXd Aw = sw.asDiagonal() * A;
            Eigen::MatrixXd G = Aw.transpose() * Aw;
            G.diagonal().array() += 1e-12;
            Eigen::VectorXd coeffs = G.ldlt().solve(Aw.transpose() * sw.cwiseProduct(b));
            if (!coeffs.allFinite()) break;
            const Eigen::VectorXd r = A * coeffs - b;
            const double mr = r.cwiseAbs().maxCoeff();
            if (mr < best_max) {
                best_max = mr;
                best = coeffs;
            }
            if (mr <= 1e-13 * std::max(1.0, b.cwiseAbs().maxCoeff())) break;
            w = (w.array() * (r.cwiseAbs().array() + 1e-14 * std::max(1.0, mr))).matrix();
            w /= w.sum();
        }
        if (best.size() == 0) continue;  // numerically rank deficient

        Polynomial::TermMap terms;
        for (int c = 0; c < m; ++c)
            if (best(c) != 0.0) terms.emplace(basis[c], best(c));
        FitResult res;
        res.poly = Polynomial(dim, std::move(terms));
        res.degree_used = deg;
        res.max_residual = best_max;
        return res;
    }
    throw std::runtime_error("fit failed at every degree down to zero");
}

}  // namespace thinfree
