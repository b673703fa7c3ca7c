#include "jetcount/scheme.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "jetcount/residue.hpp"

namespace jetcount {

AffineScheme make_scheme(std::string name, std::vector<std::string> vars,
                         std::vector<IntPoly> equations, unsigned declared_dim,
                         bool complete_intersection) {
    if (declared_dim > vars.size())
        throw ValidationError("scheme '" + name + "': declared_dim exceeds ambient dimension");
    for (const auto& f : equations)
        if (f.vars() != vars)
            throw ValidationError("scheme '" + name + "': equation uses undeclared variables");
    if (complete_intersection && equations.size() != vars.size() - declared_dim)
        throw ValidationError("scheme '" + name +
                              "': complete-intersection flag requires " +
                              std::to_string(vars.size() - declared_dim) + " equations, got " +
                              std::to_string(equations.size()));
    return AffineScheme{std::move(name), std::move(vars), std::move(equations),
                        declared_dim, complete_intersection};
}

AffineScheme affine_space(std::string name, std::vector<std::string> vars) {
    unsigned dim = static_cast<unsigned>(vars.size());
    return make_scheme(std::move(name), std::move(vars), {}, dim, true);
}

PolyMorphism make_morphism(AffineScheme source, AffineScheme target,
                           std::vector<IntPoly> components) {
    if (components.size() != target.vars.size())
        throw ValidationError("morphism: need one component per target variable");
    for (const auto& f : components)
        if (f.vars() != source.vars)
            throw ValidationError("morphism: component not over source variables");
    return PolyMorphism{std::move(source), std::move(target), std::move(components)};
}

JetSystem jet_prolong(const AffineScheme& x, unsigned k) {
    std::vector<std::string> jvars = jet_variables(x.vars, k);
    // ordered by level, then by original equation (prefix property under
    // truncation)
    std::vector<std::vector<IntPoly>> per_eq;
    per_eq.reserve(x.equations.size());
    for (const auto& f : x.equations) per_eq.push_back(jet_coefficients(f, k));
    std::vector<IntPoly> eqs;
    eqs.reserve(x.equations.size() * (k + 1));
    for (unsigned u = 0; u <= k; ++u)
        for (const auto& coeffs : per_eq) eqs.push_back(coeffs[u]);

    AffineScheme jx = make_scheme("J" + std::to_string(k) + "(" + x.name + ")",
                                  std::move(jvars), std::move(eqs),
                                  (k + 1) * x.declared_dim, x.complete_intersection);
    return JetSystem{k, std::move(jx), std::nullopt};
}

JetSystem jet_morphism(const PolyMorphism& phi, unsigned k) {
    JetSystem js = jet_prolong(phi.source, k);
    JetSystem jt = jet_prolong(phi.target, k);

    std::vector<std::vector<IntPoly>> per_comp;
    per_comp.reserve(phi.components.size());
    for (const auto& f : phi.components) per_comp.push_back(jet_coefficients(f, k));
    std::vector<IntPoly> comps;
    comps.reserve(phi.components.size() * (k + 1));
    for (unsigned u = 0; u <= k; ++u)
        for (const auto& coeffs : per_comp) comps.push_back(coeffs[u]);

    PolyMorphism jphi = make_morphism(js.scheme, jt.scheme, std::move(comps));
    return JetSystem{k, js.scheme, std::move(jphi)};
}

unsigned fp_rank(FpMatrix m, unsigned p) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    unsigned rank = 0;
    std::size_t lead = 0;
    for (std::size_t col = 0; col < cols && lead < rows; ++col) {
        std::size_t pivot = rows;
        for (std::size_t r = lead; r < rows; ++r)
            if (m[r][col] % p != 0) {
                pivot = r;
                break;
            }
        if (pivot == rows) continue;
        std::swap(m[lead], m[pivot]);
        // normalize pivot row
        unsigned inv = 1;
        {
            // Fermat inverse; p is prime
            unsigned a = m[lead][col] % p, e = p - 2, acc = 1;
            while (e) {
                if (e & 1) acc = static_cast<unsigned>(1ull * acc * a % p);
                a = static_cast<unsigned>(1ull * a * a % p);
                e >>= 1;
            }
            inv = acc;
        }
        for (std::size_t c = col; c < cols; ++c)
            m[lead][c] = static_cast<unsigned>(1ull * m[lead][c] % p * inv % p);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lead) continue;
            unsigned f = m[r][col] % p;
            if (f == 0) continue;
            for (std::size_t c = col; c < cols; ++c) {
                unsigned sub = static_cast<unsigned>(1ull * f * m[lead][c] % p);
                m[r][c] = (m[r][c] + p - sub) % p;
            }
        }
        ++lead;
        ++rank;
    }
    return rank;
}

FpSolution fp_solve(FpMatrix a, std::vector<unsigned> b, unsigned p) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    // augmented elimination
    for (std::size_t r = 0; r < rows; ++r) a[r].push_back(b[r] % p);

    std::vector<std::size_t> pivot_col;
    std::size_t lead = 0;
    for (std::size_t col = 0; col < cols && lead < rows; ++col) {
        std::size_t pivot = rows;
        for (std::size_t r = lead; r < rows; ++r)
            if (a[r][col] % p != 0) {
                pivot = r;
                break;
            }
        if (pivot == rows) continue;
        std::swap(a[lead], a[pivot]);
        unsigned inv;
        {
            unsigned x = a[lead][col] % p, e = p - 2, acc = 1;
            while (e) {
                if (e & 1) acc = static_cast<unsigned>(1ull * acc * x % p);
                x = static_cast<unsigned>(1ull * x * x % p);
                e >>= 1;
            }
            inv = acc;
        }
        for (std::size_t c = col; c <= cols; ++c)
            a[lead][c] = static_cast<unsigned>(1ull * a[lead][c] % p * inv % p);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lead) continue;
            unsigned f = a[r][col] % p;
            if (f == 0) continue;
            for (std::size_t c = col; c <= cols; ++c) {
                unsigned sub = static_cast<unsigned>(1ull * f * a[lead][c] % p);
                a[r][c] = (a[r][c] + p - sub) % p;
            }
        }
        pivot_col.push_back(col);
        ++lead;
    }
    // inconsistent iff a zero row has nonzero rhs
    for (std::size_t r = lead; r < rows; ++r)
        if (a[r][cols] % p != 0) return FpSolution{};

    FpSolution sol;
    sol.consistent = true;
    sol.particular.assign(cols, 0);
    for (std::size_t i = 0; i < pivot_col.size(); ++i)
        sol.particular[pivot_col[i]] = a[i][cols];

    std::vector<bool> is_pivot(cols, false);
    for (std::size_t c : pivot_col) is_pivot[c] = true;
    for (std::size_t free_col = 0; free_col < cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<unsigned> v(cols, 0);
        v[free_col] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i)
            v[pivot_col[i]] = (p - a[i][free_col] % p) % p;
        sol.null_basis.push_back(std::move(v));
    }
    return sol;
}

namespace {

// Jacobian rows of (source equations, components) evaluated at an F_p point.
FpMatrix morphism_jacobian_at(const PolyMorphism& phi, const FpPoint& point, unsigned p) {
    const std::size_t m = phi.source.vars.size();
    std::vector<const IntPoly*> rows_src;
    for (const auto& f : phi.source.equations) rows_src.push_back(&f);
    for (const auto& f : phi.components) rows_src.push_back(&f);

    std::vector<Int> pt(point.begin(), point.end());
    Int pm(p);
    FpMatrix jac(rows_src.size(), std::vector<unsigned>(m, 0));
    for (std::size_t r = 0; r < rows_src.size(); ++r)
        for (std::size_t c = 0; c < m; ++c)
            jac[r][c] = static_cast<unsigned>(
                eval_mod(rows_src[r]->partial_derivative(c), pt, pm).get_ui());
    return jac;
}

void require_ci_presentation(const PolyMorphism& phi) {
    const auto& x = phi.source;
    if (!x.complete_intersection)
        throw ValidationError("source presentation not flagged complete-intersection");
    if (x.equations.size() != x.vars.size() - x.declared_dim)
        throw ValidationError("complete-intersection flag inconsistent with equation count");
}

}  // namespace

bool is_singular_point(const PolyMorphism& phi, const FpPoint& point, unsigned p) {
    require_prime(p);
    require_ci_presentation(phi);
    const auto& x = phi.source;
    if (point.size() != x.vars.size())
        throw ValidationError("point arity mismatch");
    std::vector<Int> pt(point.begin(), point.end());
    Int pm(p);
    for (const auto& f : x.equations)
        if (eval_mod(f, pt, pm) != 0)
            throw ValidationError("point violates source equations mod p");

    unsigned full = static_cast<unsigned>(x.equations.size() + phi.components.size());
    return fp_rank(morphism_jacobian_at(phi, point, p), p) < full;
}

std::vector<FpPoint> singular_reduction_set(const PolyMorphism& phi, unsigned p,
                                            unsigned prime_floor, const Budget& budget) {
    require_prime(p);
    require_ci_presentation(phi);
    if (p < prime_floor)
        throw ValidationError("prime " + std::to_string(p) + " below configured floor " +
                              std::to_string(prime_floor));
    const std::size_t m = phi.source.vars.size();
    Int work = int_pow(p, static_cast<unsigned long>(m)) *
               Int(std::max<std::size_t>(1, phi.source.equations.size()));
    if (work > budget.limit) throw BudgetError(work, budget.limit);

    // precompute partials for the Jacobian rows
    std::vector<const IntPoly*> rows;
    for (const auto& f : phi.source.equations) rows.push_back(&f);
    for (const auto& f : phi.components) rows.push_back(&f);
    std::vector<std::vector<IntPoly>> partials;
    for (const IntPoly* f : rows) {
        std::vector<IntPoly> row;
        for (std::size_t c = 0; c < m; ++c) row.push_back(f->partial_derivative(c));
        partials.push_back(std::move(row));
    }
    unsigned full = static_cast<unsigned>(rows.size());

    std::vector<FpPoint> out;
    FpPoint point(m, 0);
    std::vector<Int> pt(m, 0);
    Int pm(p);
    while (true) {
        for (std::size_t i = 0; i < m; ++i) pt[i] = point[i];
        bool on_scheme = true;
        for (const auto& f : phi.source.equations)
            if (eval_mod(f, pt, pm) != 0) {
                on_scheme = false;
                break;
            }
        if (on_scheme) {
            FpMatrix jac(full, std::vector<unsigned>(m, 0));
            for (unsigned r = 0; r < full; ++r)
                for (std::size_t c = 0; c < m; ++c)
                    jac[r][c] = static_cast<unsigned>(eval_mod(partials[r][c], pt, pm).get_ui());
            if (fp_rank(std::move(jac), p) < full) out.push_back(point);
        }
        // lexicographic odometer
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (++point[i] < p) break;
            point[i] = 0;
            if (i == 0) return out;
        }
        if (m == 0) return out;
    }
}

std::size_t validate_morphism(const PolyMorphism& phi, unsigned p, std::size_t samples,
                              std::uint64_t seed) {
    if (phi.target.equations.empty()) return 0;  // nothing to check
    const std::size_t m = phi.source.vars.size();
    std::mt19937_64 rng(seed);
    Int pm(p);
    std::size_t checked = 0;
    std::size_t tries = 0;
    const std::size_t max_tries = samples * 64;
    std::vector<Int> pt(m);
    while (checked < samples && tries < max_tries) {
        ++tries;
        for (std::size_t i = 0; i < m; ++i) pt[i] = Int(rng() % p);
        bool on_scheme = true;
        for (const auto& f : phi.source.equations)
            if (eval_mod(f, pt, pm) != 0) {
                on_scheme = false;
                break;
            }
        if (!on_scheme) continue;
        std::vector<Int> image;
        image.reserve(phi.components.size());
        for (const auto& f : phi.components) image.push_back(eval_mod(f, pt, pm));
        for (const auto& h : phi.target.equations) {
            if (eval_mod(h, image, pm) != 0) {
                std::ostringstream msg;
                msg << "morphism does not land in target: equation '" << h.to_string()
                    << "' nonzero at image of (";
                for (std::size_t i = 0; i < pt.size(); ++i)
                    msg << (i ? "," : "") << pt[i].get_str();
                msg << ") mod " << p;
                throw ValidationError(msg.str());
            }
        }
        ++checked;
    }
    return checked;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

struct RawSection {
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> entries;

    const std::pair<std::string, std::size_t>* find(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    }
};

}  // namespace

DefinitionFile parse_definition_file(const std::string& text) {
    std::vector<RawSection> sections;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("unterminated section header", lineno);
            std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty()) throw ParseError("empty section name", lineno);
            sections.push_back(RawSection{name, lineno, {}});
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno);
        if (sections.empty())
            throw ParseError("key outside of any section", lineno);
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        sections.back().entries.emplace_back(key, std::make_pair(value, lineno));
    }

    static const std::vector<std::string> scheme_keys = {"vars", "eqs", "dim", "ci"};
    static const std::vector<std::string> morphism_keys = {"source", "target", "maps"};

    DefinitionFile out;
    for (const auto& sec : sections) {
        bool is_morphism = sec.find("maps") != nullptr;
        const auto& allowed = is_morphism ? morphism_keys : scheme_keys;
        for (const auto& [k, v] : sec.entries) {
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                throw ParseError("unknown key '" + k + "' in section [" + sec.name + "]",
                                 v.second);
        }
        if (out.schemes.count(sec.name) || out.morphisms.count(sec.name))
            throw ParseError("duplicate section name '" + sec.name + "'", sec.line);
        if (is_morphism) {
            const auto* src = sec.find("source");
            const auto* tgt = sec.find("target");
            const auto* maps = sec.find("maps");
            if (!src || !tgt)
                throw ParseError("morphism [" + sec.name + "] needs source and target",
                                 sec.line);
            auto sit = out.schemes.find(src->first);
            if (sit == out.schemes.end())
                throw ParseError("unknown source scheme '" + src->first + "'", src->second);
            auto tit = out.schemes.find(tgt->first);
            if (tit == out.schemes.end())
                throw ParseError("unknown target scheme '" + tgt->first + "'", tgt->second);
            std::vector<IntPoly> comps;
            for (const auto& ptext : split(maps->first, ';')) {
                try {
                    comps.push_back(parse_poly(ptext, sit->second.vars));
                } catch (const ParseError& e) {
                    throw ParseError(std::string(e.what()) + " in maps of [" + sec.name + "]",
                                     maps->second);
                }
            }
            out.morphisms.emplace(sec.name,
                                  make_morphism(sit->second, tit->second, std::move(comps)));
        } else {
            const auto* vars = sec.find("vars");
            const auto* dim = sec.find("dim");
            if (!vars) throw ParseError("scheme [" + sec.name + "] needs vars", sec.line);
            if (!dim) throw ParseError("scheme [" + sec.name + "] needs dim", sec.line);
            std::vector<std::string> vlist = split(vars->first, ',');
            for (const auto& v : vlist)
                if (v.empty()) throw ParseError("empty variable name", vars->second);
            unsigned d = 0;
            try {
                d = static_cast<unsigned>(std::stoul(dim->first));
            } catch (...) {
                throw ParseError("dim must be a natural number", dim->second);
            }
            bool ci = false;
            if (const auto* c = sec.find("ci")) {
                if (c->first == "yes")
                    ci = true;
                else if (c->first == "no")
                    ci = false;
                else
                    throw ParseError("ci must be yes or no", c->second);
            }
            std::vector<IntPoly> eqs;
            if (const auto* e = sec.find("eqs")) {
                for (const auto& ptext : split(e->first, ';')) {
                    if (ptext.empty()) continue;
                    try {
                        eqs.push_back(parse_poly(ptext, vlist));
                    } catch (const ParseError& pe) {
                        throw ParseError(std::string(pe.what()) + " in eqs of [" + sec.name +
                                             "]",
                                         e->second);
                    }
                }
            }
            try {
                out.schemes.emplace(sec.name, make_scheme(sec.name, vlist, std::move(eqs), d, ci));
            } catch (const ValidationError& ve) {
                throw ParseError(ve.what(), sec.line);
            }
        }
    }
    return out;
}

}  // namespace jetcount
