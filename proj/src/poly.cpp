#include "jetcount/poly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace jetcount {

bool IntPoly::TermOrder::operator()(const Exponents& a, const Exponents& b) const {
    unsigned long da = std::accumulate(a.begin(), a.end(), 0ul);
    unsigned long db = std::accumulate(b.begin(), b.end(), 0ul);
    if (da != db) return da > db;
    // grevlex tie-break: the term whose rightmost differing exponent is
    // smaller prints first
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

IntPoly IntPoly::constant(std::vector<std::string> vars, Int c) {
    IntPoly p(std::move(vars));
    if (c != 0) p.terms_.emplace(Exponents(p.vars_.size(), 0), std::move(c));
    return p;
}

IntPoly IntPoly::variable(std::vector<std::string> vars, std::size_t index) {
    IntPoly p(std::move(vars));
    if (index >= p.vars_.size())
        throw ValidationError("variable index out of range");
    Exponents e(p.vars_.size(), 0);
    e[index] = 1;
    p.terms_.emplace(std::move(e), Int(1));
    return p;
}

long IntPoly::degree() const {
    if (terms_.empty()) return -1;
    const Exponents& lead = terms_.begin()->first;
    return static_cast<long>(std::accumulate(lead.begin(), lead.end(), 0ul));
}

void IntPoly::add_term(Exponents e, const Int& c) {
    if (e.size() != vars_.size())
        throw ValidationError("exponent vector length mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(std::move(e), c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

IntPoly IntPoly::operator-() const {
    IntPoly r(vars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

IntPoly IntPoly::operator+(const IntPoly& o) const {
    if (vars_ != o.vars_) throw ValidationError("variable set mismatch in +");
    IntPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

IntPoly IntPoly::operator-(const IntPoly& o) const {
    if (vars_ != o.vars_) throw ValidationError("variable set mismatch in -");
    IntPoly r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

IntPoly IntPoly::operator*(const IntPoly& o) const {
    if (vars_ != o.vars_) throw ValidationError("variable set mismatch in *");
    IntPoly r(vars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
                if (e[i] > kMaxExponent) throw ValidationError("exponent overflow in *");
            }
            r.add_term(std::move(e), ca * cb);
        }
    }
    return r;
}

IntPoly IntPoly::operator*(const Int& c) const {
    IntPoly r(vars_);
    if (c == 0) return r;
    for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
    return r;
}

IntPoly IntPoly::partial_derivative(std::size_t var_index) const {
    if (var_index >= vars_.size())
        throw ValidationError("unknown variable index in derivative");
    IntPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var_index] == 0) continue;
        Exponents d = e;
        d[var_index] -= 1;
        r.add_term(std::move(d), c * Int(e[var_index]));
    }
    return r;
}

IntPoly IntPoly::partial_derivative(const std::string& var) const {
    return partial_derivative(var_index_checked(var));
}

std::size_t IntPoly::var_index_checked(const std::string& var) const {
    auto it = std::find(vars_.begin(), vars_.end(), var);
    if (it == vars_.end())
        throw ValidationError("unknown variable '" + var + "'");
    return static_cast<std::size_t>(it - vars_.begin());
}

Int IntPoly::evaluate(const std::vector<Int>& point) const {
    if (point.size() != vars_.size())
        throw ValidationError("point arity mismatch in evaluate");
    Int acc = 0;
    for (const auto& [e, c] : terms_) {
        Int t = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            t *= int_pow(point[i], e[i]);
        }
        acc += t;
    }
    return acc;
}

IntPoly IntPoly::with_variables(const std::vector<std::string>& super) const {
    std::vector<std::size_t> pos(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(super.begin(), super.end(), vars_[i]);
        if (it == super.end())
            throw ValidationError("variable '" + vars_[i] + "' missing from superset");
        pos[i] = static_cast<std::size_t>(it - super.begin());
    }
    IntPoly r(super);
    for (const auto& [e, c] : terms_) {
        Exponents ne(super.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) ne[pos[i]] = e[i];
        r.terms_.emplace(std::move(ne), c);
    }
    return r;
}

IntPoly IntPoly::renamed(const std::vector<std::string>& names) const {
    if (names.size() != vars_.size())
        throw ValidationError("renamed: arity mismatch");
    IntPoly r(names);
    r.terms_ = terms_;
    return r;
}

IntPoly IntPoly::substituted(std::size_t var_index, const Int& value) const {
    if (var_index >= vars_.size())
        throw ValidationError("unknown variable index in substitution");
    IntPoly r(vars_);
    for (const auto& [e, c] : terms_) {
        Exponents ne = e;
        ne[var_index] = 0;
        r.add_term(std::move(ne), c * int_pow(value, e[var_index]));
    }
    return r;
}

IntPoly IntPoly::restricted_to_prefix(std::size_t n_vars) const {
    if (n_vars > vars_.size())
        throw ValidationError("restricted_to_prefix: not a prefix");
    IntPoly r(std::vector<std::string>(vars_.begin(), vars_.begin() + n_vars));
    for (const auto& [e, c] : terms_) {
        for (std::size_t i = n_vars; i < e.size(); ++i)
            if (e[i] != 0)
                throw ValidationError("restricted_to_prefix: term uses variable '" +
                                      vars_[i] + "'");
        r.terms_.emplace(Exponents(e.begin(), e.begin() + n_vars), c);
    }
    return r;
}

namespace {

// Canonical display order groups each base variable with its jet levels
// ("x1, x1(1), x2, x2(1)"), matching how jet equations are written, even
// though jet rings keep their variables level-major internally.
std::vector<std::size_t> display_permutation(const std::vector<std::string>& vars) {
    auto decompose = [](const std::string& name) -> std::pair<std::string, unsigned> {
        if (!name.empty() && name.back() == ')') {
            std::size_t open = name.rfind('(');
            if (open != std::string::npos && open + 1 < name.size() - 1) {
                std::string digits = name.substr(open + 1, name.size() - open - 2);
                if (std::all_of(digits.begin(), digits.end(), [](char c) {
                        return std::isdigit(static_cast<unsigned char>(c));
                    }))
                    return {name.substr(0, open), static_cast<unsigned>(std::stoul(digits))};
            }
        }
        return {name, 0};
    };
    std::vector<std::string> base_order;
    std::vector<std::pair<std::size_t, unsigned>> keys(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
        auto [base, level] = decompose(vars[i]);
        auto it = std::find(base_order.begin(), base_order.end(), base);
        if (it == base_order.end()) {
            base_order.push_back(base);
            it = std::prev(base_order.end());
        }
        keys[i] = {static_cast<std::size_t>(it - base_order.begin()), level};
    }
    std::vector<std::size_t> perm(vars.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return perm;
}

}  // namespace

std::string IntPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<std::size_t> perm = display_permutation(vars_);

    std::vector<std::pair<Exponents, const Int*>> ordered;
    ordered.reserve(terms_.size());
    for (const auto& [e, c] : terms_) {
        Exponents pe(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) pe[i] = e[perm[i]];
        ordered.emplace_back(std::move(pe), &c);
    }
    TermOrder less;
    std::sort(ordered.begin(), ordered.end(),
              [&](const auto& a, const auto& b) { return less(a.first, b.first); });

    std::ostringstream out;
    bool first = true;
    for (const auto& [e, cp] : ordered) {
        const Int& c = *cp;
        Int a = abs(c);
        if (first) {
            if (c < 0) out << "-";
            first = false;
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        bool has_factor = std::any_of(e.begin(), e.end(), [](unsigned x) { return x != 0; });
        bool coeff_shown = !has_factor || a != 1;
        if (coeff_shown) out << a.get_str();
        bool need_star = coeff_shown;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (need_star) out << "*";
            out << vars_[perm[i]];
            if (e[i] > 1) out << "^" << e[i];
            need_star = true;
        }
    }
    return out.str();
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }
    std::string integer_digits() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer", start);
        return s.substr(start, pos - start);
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= s.size() || !std::isalpha(static_cast<unsigned char>(s[pos])))
            throw ParseError("expected variable name", start);
        ++pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }
};

unsigned parse_exponent(Lexer& lx) {
    std::size_t at = lx.pos;
    std::string digits = lx.integer_digits();
    if (digits.size() > 7) throw ParseError("exponent overflow", at);
    unsigned long v = std::stoul(digits);
    if (v > kMaxExponent) throw ParseError("exponent overflow", at);
    return static_cast<unsigned>(v);
}

}  // namespace

IntPoly parse_poly(const std::string& text, const std::vector<std::string>& variables) {
    Lexer lx{text};
    IntPoly result(variables);

    auto var_index = [&](const std::string& name, std::size_t at) {
        auto it = std::find(variables.begin(), variables.end(), name);
        if (it == variables.end())
            throw ParseError("unknown variable name '" + name + "'", at);
        return static_cast<std::size_t>(it - variables.begin());
    };

    bool first_term = true;
    while (!lx.eof()) {
        int sign = 1;
        if (lx.accept('+')) {
            sign = 1;
        } else if (lx.accept('-')) {
            sign = -1;
        } else if (!first_term) {
            throw ParseError("expected '+' or '-' between terms", lx.pos);
        }
        first_term = false;

        Int coeff = 1;
        IntPoly::Exponents expo(variables.size(), 0);
        bool saw_factor = false;
        bool saw_coeff = false;

        if (std::isdigit(static_cast<unsigned char>(lx.peek()))) {
            coeff = Int(lx.integer_digits());
            saw_coeff = true;
            lx.accept('*');  // "2*x" and "2x" both parse
        }
        while (true) {
            if (std::isalpha(static_cast<unsigned char>(lx.peek()))) {
                std::size_t at = lx.pos;
                std::string name = lx.ident();
                if (lx.accept('(')) {
                    std::string lvl = lx.integer_digits();
                    if (!lx.accept(')'))
                        throw ParseError("expected ')' in jet variable", lx.pos);
                    name += "(" + lvl + ")";
                }
                unsigned e = 1;
                if (lx.accept('^')) e = parse_exponent(lx);
                std::size_t idx = var_index(name, at);
                if (expo[idx] > kMaxExponent - e)
                    throw ParseError("exponent overflow", at);
                expo[idx] += e;
                saw_factor = true;
                if (lx.accept('*')) continue;
            }
            break;
        }
        if (!saw_factor && !saw_coeff)
            throw ParseError("expected term", lx.pos);
        result.add_term(std::move(expo), sign < 0 ? Int(-coeff) : coeff);
    }
    return result;
}

std::string jet_variable_name(const std::string& base, unsigned level) {
    if (level == 0) return base;
    return base + "(" + std::to_string(level) + ")";
}

std::vector<std::string> jet_variables(const std::vector<std::string>& vars, unsigned k) {
    std::vector<std::string> out;
    out.reserve(vars.size() * (k + 1));
    for (unsigned level = 0; level <= k; ++level)
        for (const auto& v : vars) out.push_back(jet_variable_name(v, level));
    return out;
}

namespace {

// Truncated power series with IntPoly coefficients, length k+1.
using PolySeries = std::vector<IntPoly>;

PolySeries series_mul(const PolySeries& a, const PolySeries& b, unsigned k,
                      const std::vector<std::string>& jvars) {
    PolySeries out(k + 1, IntPoly(jvars));
    for (unsigned i = 0; i <= k; ++i) {
        if (a[i].is_zero()) continue;
        for (unsigned j = 0; i + j <= k; ++j) {
            if (b[j].is_zero()) continue;
            out[i + j] = out[i + j] + a[i] * b[j];
        }
    }
    return out;
}

}  // namespace

std::vector<IntPoly> jet_coefficients(const IntPoly& f, unsigned k) {
    const auto& vars = f.vars();
    const std::size_t m = vars.size();
    std::vector<std::string> jvars = jet_variables(vars, k);

    // x_i maps to the series (x_i, x_i(1), ..., x_i(k)).
    std::vector<PolySeries> var_series(m, PolySeries(k + 1, IntPoly(jvars)));
    for (std::size_t i = 0; i < m; ++i)
        for (unsigned level = 0; level <= k; ++level)
            var_series[i][level] = IntPoly::variable(jvars, level * m + i);

    PolySeries acc(k + 1, IntPoly(jvars));
    for (const auto& [e, c] : f.terms()) {
        PolySeries t(k + 1, IntPoly(jvars));
        t[0] = IntPoly::constant(jvars, c);
        for (std::size_t i = 0; i < m; ++i)
            for (unsigned rep = 0; rep < e[i]; ++rep)
                t = series_mul(t, var_series[i], k, jvars);
        for (unsigned u = 0; u <= k; ++u) acc[u] = acc[u] + t[u];
    }
    return acc;
}

IntPoly jet_coefficient(const IntPoly& f, unsigned u, unsigned k) {
    if (u > k)
        throw ValidationError("jet_coefficient: order " + std::to_string(u) +
                              " exceeds depth " + std::to_string(k));
    return jet_coefficients(f, k)[u];
}

}  // namespace jetcount
