#include "jetcount/counting.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "jetcount/residue.hpp"

namespace jetcount {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Equation compiled for repeated evaluation mod a word-sized modulus.
struct CompiledPoly {
    struct Term {
        std::uint64_t coeff;
        std::vector<std::pair<std::uint32_t, std::uint32_t>> factors;  // (var, exp)
    };
    std::vector<Term> terms;

    static CompiledPoly compile(const IntPoly& f, const Int& modulus) {
        CompiledPoly out;
        for (const auto& [e, c] : f.terms()) {
            Term t;
            t.coeff = mod_floor(c, modulus).get_ui();
            for (std::size_t i = 0; i < e.size(); ++i)
                if (e[i] != 0)
                    t.factors.emplace_back(static_cast<std::uint32_t>(i), e[i]);
            out.terms.push_back(std::move(t));
        }
        return out;
    }

    std::uint64_t eval(const std::vector<std::uint64_t>& pt, std::uint64_t m) const {
        std::uint64_t acc = 0;
        for (const auto& t : terms) {
            std::uint64_t v = t.coeff;
            for (const auto& [var, exp] : t.factors) {
                std::uint64_t base = pt[var] % m, pw = 1;
                unsigned e = exp;
                while (e) {
                    if (e & 1) pw = pw * base % m;
                    base = base * base % m;
                    e >>= 1;
                }
                v = v * pw % m;
            }
            acc = (acc + v) % m;
        }
        return acc;
    }
};

constexpr std::uint64_t kWordModulusLimit = 1ull << 31;

bool point_satisfies_all(const std::vector<IntPoly>& eqs, const std::vector<Int>& pt,
                         const Int& modulus) {
    for (const auto& f : eqs)
        if (eval_mod(f, pt, modulus) != 0) return false;
    return true;
}

// Lexicographic odometer over [0, radix)^m; returns false on wrap-around.
template <typename Vec>
bool odometer_next(Vec& v, std::uint64_t radix) {
    std::size_t i = v.size();
    while (i > 0) {
        --i;
        if (static_cast<std::uint64_t>(++v[i]) < radix) return true;
        v[i] = 0;
    }
    return false;
}

void check_budget_estimate(const Int& work, const Budget& budget) {
    if (work > budget.limit) throw BudgetError(work, budget.limit);
}

struct NaiveSpec {
    const std::vector<IntPoly>& eqs;
    // optional level-1 filter: mod-p reductions that are allowed
    const std::set<FpPoint>* level1_allowed = nullptr;
    unsigned p = 0;
};

Int naive_enumerate(const NaiveSpec& spec, std::size_t m, const Int& modulus,
                    std::uint64_t& nodes, const Budget& budget) {
    Int points = int_pow(modulus, static_cast<unsigned long>(m));
    Int work = points * Int(std::max<std::size_t>(1, spec.eqs.size()));
    check_budget_estimate(work, budget);

    if (spec.eqs.empty() && !spec.level1_allowed) return points;

    Int count = 0;
    if (modulus < kWordModulusLimit) {
        std::uint64_t mword = modulus.get_ui();
        std::vector<CompiledPoly> compiled;
        compiled.reserve(spec.eqs.size());
        for (const auto& f : spec.eqs) compiled.push_back(CompiledPoly::compile(f, modulus));
        std::vector<std::uint64_t> pt(m, 0);
        FpPoint red(m, 0);
        do {
            ++nodes;
            if (spec.level1_allowed) {
                for (std::size_t i = 0; i < m; ++i)
                    red[i] = static_cast<unsigned>(pt[i] % spec.p);
                if (!spec.level1_allowed->count(red)) continue;
            }
            bool ok = true;
            for (const auto& c : compiled)
                if (c.eval(pt, mword) != 0) {
                    ok = false;
                    break;
                }
            if (ok) ++count;
        } while (odometer_next(pt, mword));
        return count;
    }

    // big-modulus fallback
    std::vector<Int> pt(m, 0);
    FpPoint red(m, 0);
    Int pm(spec.p);
    while (true) {
        ++nodes;
        bool ok = true;
        if (spec.level1_allowed) {
            for (std::size_t i = 0; i < m; ++i)
                red[i] = static_cast<unsigned>(mod_floor(pt[i], pm).get_ui());
            ok = spec.level1_allowed->count(red) != 0;
        }
        if (ok) ok = point_satisfies_all(spec.eqs, pt, modulus);
        if (ok) ++count;
        std::size_t i = m;
        bool carried = false;
        while (i > 0) {
            --i;
            if (++pt[i] < modulus) {
                carried = true;
                break;
            }
            pt[i] = 0;
        }
        if (!carried) break;
    }
    return count;
}

}  // namespace

AffineScheme fiber_scheme(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                          unsigned k) {
    if (y.size() != phi.target.vars.size())
        throw ValidationError("fiber point arity mismatch");
    Int modulus = int_pow(p, k);
    for (const auto& yi : y)
        if (yi < 0 || yi >= modulus)
            throw ValidationError("fiber point not in canonical range [0, p^k)");
    if (!point_satisfies_all(phi.target.equations, y, modulus))
        throw ValidationError("fiber point violates target equations mod p^k");

    std::vector<IntPoly> eqs = phi.source.equations;
    for (std::size_t i = 0; i < phi.components.size(); ++i)
        eqs.push_back(phi.components[i] -
                      IntPoly::constant(phi.source.vars, y[i]));

    long d = phi.relative_dim();
    unsigned m = static_cast<unsigned>(phi.source.vars.size());
    bool ci = phi.source.complete_intersection && d >= 0 &&
              eqs.size() == m - static_cast<unsigned>(d);
    unsigned dim = d >= 0 ? static_cast<unsigned>(d) : 0u;
    AffineScheme fib;
    fib.name = phi.source.name + "_fiber";
    fib.vars = phi.source.vars;
    fib.equations = std::move(eqs);
    fib.declared_dim = dim;
    fib.complete_intersection = ci;
    return fib;
}

CountResult count_points_naive(const AffineScheme& x, unsigned p, unsigned k,
                               const Budget& budget) {
    auto t0 = Clock::now();
    require_prime(p);
    if (k == 0) throw ValidationError("level k must be >= 1");
    CountResult res;
    res.method_used = CountMethod::Naive;
    NaiveSpec spec{x.equations, nullptr, p};
    res.count = naive_enumerate(spec, x.vars.size(), int_pow(p, k), res.nodes_visited, budget);
    res.wall_seconds = seconds_since(t0);
    return res;
}

namespace {

struct TreeCounter {
    const AffineScheme& scheme;
    unsigned p;
    unsigned k;
    const Budget& budget;
    const std::set<FpPoint>* level1_allowed;

    std::size_t m;
    std::vector<std::vector<IntPoly>> partials;  // [eq][var]
    bool shortcut_ok = false;
    std::uint64_t work = 0;
    std::uint64_t nodes = 0;

    // word-sized fast path: residuals tracked mod p^k, which decides
    // p^j-divisibility and quotients mod p identically to exact integers
    bool word_ok = false;
    std::uint64_t pk_word = 0;
    std::vector<CompiledPoly> eqs_pk;

    explicit TreeCounter(const AffineScheme& x, unsigned p_, unsigned k_, const Budget& b,
                         const std::set<FpPoint>* allowed)
        : scheme(x), p(p_), k(k_), budget(b), level1_allowed(allowed), m(x.vars.size()) {
        if (x.complete_intersection) {
            if (x.equations.size() != m - x.declared_dim)
                throw ValidationError(
                    "complete-intersection flag inconsistent with equation count");
            shortcut_ok = true;
        }
        for (const auto& f : x.equations) {
            std::vector<IntPoly> row;
            for (std::size_t c = 0; c < m; ++c) row.push_back(f.partial_derivative(c));
            partials.push_back(std::move(row));
        }
    }

    void charge(std::uint64_t units) {
        work += units;
        if (work > budget.limit) throw BudgetError(Int(work), budget.limit);
    }

    Int run() {
        const std::size_t l = scheme.equations.size();
        Int root_work = int_pow(p, static_cast<unsigned long>(m)) *
                        Int(std::max<std::size_t>(1, l));
        check_budget_estimate(root_work, budget);

        if (l == 0) {
            // affine space: every residue vector is a solution
            Int total = int_pow(p, static_cast<unsigned long>(k * m));
            if (!level1_allowed) return total;
            Int per_root = int_pow(p, static_cast<unsigned long>((k - 1) * m));
            return Int(level1_allowed->size()) * per_root;
        }

        // hot root loop runs on compiled word arithmetic
        std::vector<CompiledPoly> eqs_c, partials_c;
        Int pm(p);
        for (const auto& f : scheme.equations) eqs_c.push_back(CompiledPoly::compile(f, pm));
        for (const auto& row : partials)
            for (const auto& d : row) partials_c.push_back(CompiledPoly::compile(d, pm));
        Int pk = int_pow(p, k);
        if (pk < kWordModulusLimit) {
            word_ok = true;
            pk_word = pk.get_ui();
            for (const auto& f : scheme.equations)
                eqs_pk.push_back(CompiledPoly::compile(f, pk));
        }

        Int total = 0;
        std::vector<Int> pt(m, 0);
        auto handle_root = [&](const std::vector<std::uint64_t>& root) {
            charge(static_cast<std::uint64_t>(l));
            for (std::size_t i = 0; i < l; ++i)
                if (eqs_c[i].eval(root, p) != 0) return;
            ++nodes;
            // Jacobian mod p is constant on the whole subtree over this root
            FpMatrix jac(l, std::vector<unsigned>(m, 0));
            for (std::size_t r = 0; r < l; ++r)
                for (std::size_t c = 0; c < m; ++c)
                    jac[r][c] = static_cast<unsigned>(partials_c[r * m + c].eval(root, p));
            unsigned rank = fp_rank(jac, p);
            if (shortcut_ok && rank == l) {
                total += int_pow(p, static_cast<unsigned long>((k - 1) * (m - l)));
            } else if (k == 1) {
                total += 1;
            } else if (word_ok) {
                std::vector<std::uint64_t> residual(l);
                for (std::size_t i = 0; i < l; ++i)
                    residual[i] = eqs_pk[i].eval(root, pk_word);
                total += expand_word(root, residual, jac, 1);
            } else {
                for (std::size_t i = 0; i < m; ++i) pt[i] = static_cast<long>(root[i]);
                std::vector<Int> residual(l);
                for (std::size_t i = 0; i < l; ++i)
                    residual[i] = scheme.equations[i].evaluate(pt);
                total += expand(pt, residual, jac, 1);
            }
        };

        if (level1_allowed) {
            // the filter prunes at level 1: only allowed roots are visited
            std::vector<std::uint64_t> root(m);
            for (const FpPoint& point : *level1_allowed) {
                for (std::size_t i = 0; i < m; ++i) root[i] = point[i];
                handle_root(root);
            }
        } else {
            std::vector<std::uint64_t> root(m, 0);
            do {
                handle_root(root);
            } while (odometer_next(root, p));
        }
        return total;
    }

    // Same lifting with word arithmetic; residuals are F(x) mod p^k.
    Int expand_word(const std::vector<std::uint64_t>& x,
                    const std::vector<std::uint64_t>& residual, const FpMatrix& jac,
                    unsigned j) {
        if (j == k) return 1;
        const std::size_t l = scheme.equations.size();
        charge(static_cast<std::uint64_t>(l + m));
        ++nodes;

        std::uint64_t pj = 1;
        for (unsigned i = 0; i < j; ++i) pj *= p;
        std::vector<unsigned> rhs(l);
        for (std::size_t i = 0; i < l; ++i) {
            if (residual[i] % pj != 0)
                throw Error("internal: tree residual lost divisibility by p^j");
            std::uint64_t q = (residual[i] / pj) % p;
            rhs[i] = static_cast<unsigned>((p - q) % p);
        }
        FpSolution sol = fp_solve(jac, rhs, p);
        if (!sol.consistent) return 0;

        const std::size_t nullity = sol.null_basis.size();
        Int subtotal = 0;
        std::vector<unsigned> coeffs(nullity, 0);
        std::vector<std::uint64_t> child(m);
        std::vector<std::uint64_t> child_res(l);
        while (true) {
            for (std::size_t i = 0; i < m; ++i) {
                std::uint64_t vi = sol.particular[i];
                for (std::size_t w = 0; w < nullity; ++w)
                    vi += static_cast<std::uint64_t>(coeffs[w]) * sol.null_basis[w][i];
                child[i] = x[i] + pj * (vi % p);
            }
            charge(static_cast<std::uint64_t>(l));
            for (std::size_t i = 0; i < l; ++i)
                child_res[i] = eqs_pk[i].eval(child, pk_word);
            subtotal += expand_word(child, child_res, jac, j + 1);
            if (nullity == 0 || !odometer_next(coeffs, p)) break;
        }
        return subtotal;
    }

    // x is an exact lift in [0, p^j)^m with residual F(x) divisible by p^j.
    Int expand(const std::vector<Int>& x, const std::vector<Int>& residual,
               const FpMatrix& jac, unsigned j) {
        if (j == k) return 1;
        const std::size_t l = scheme.equations.size();
        charge(static_cast<std::uint64_t>(l + m));
        ++nodes;

        Int pj = int_pow(p, j);
        std::vector<unsigned> rhs(l);
        for (std::size_t i = 0; i < l; ++i) {
            if (!mpz_divisible_p(residual[i].get_mpz_t(), pj.get_mpz_t()))
                throw Error("internal: tree residual lost divisibility by p^j");
            Int q = residual[i] / pj;
            rhs[i] = static_cast<unsigned>(mod_floor(-q, Int(p)).get_ui());
        }
        FpSolution sol = fp_solve(jac, rhs, p);
        if (!sol.consistent) return 0;

        const std::size_t nullity = sol.null_basis.size();
        Int subtotal = 0;
        std::vector<unsigned> coeffs(nullity, 0);
        std::vector<Int> child(m);
        std::vector<Int> child_res(l);
        while (true) {
            for (std::size_t i = 0; i < m; ++i) {
                unsigned long vi = sol.particular[i];
                for (std::size_t w = 0; w < nullity; ++w)
                    vi += static_cast<unsigned long>(coeffs[w]) * sol.null_basis[w][i];
                child[i] = x[i] + pj * Int(vi % p);
            }
            charge(static_cast<std::uint64_t>(l));
            for (std::size_t i = 0; i < l; ++i)
                child_res[i] = scheme.equations[i].evaluate(child);
            subtotal += expand(child, child_res, jac, j + 1);
            if (nullity == 0 || !odometer_next(coeffs, p)) break;
        }
        return subtotal;
    }
};

}  // namespace

CountResult count_points_tree(const AffineScheme& x, unsigned p, unsigned k,
                              const Budget& budget) {
    auto t0 = Clock::now();
    require_prime(p);
    if (k == 0) throw ValidationError("level k must be >= 1");
    TreeCounter tc(x, p, k, budget, nullptr);
    CountResult res;
    res.method_used = CountMethod::Tree;
    res.count = tc.run();
    res.nodes_visited = tc.nodes;
    res.wall_seconds = seconds_since(t0);
    return res;
}

CountResult count_points_jetring(const AffineScheme& x, unsigned p, unsigned e,
                                 const Budget& budget) {
    auto t0 = Clock::now();
    require_prime(p);
    if (e == 0) throw ValidationError("truncation length e must be >= 1");
    const std::size_t m = x.vars.size();
    Int points = int_pow(p, static_cast<unsigned long>(e * m));
    Int work = points * Int(std::max<std::size_t>(1, x.equations.size()));
    check_budget_estimate(work, budget);

    CountResult res;
    res.method_used = CountMethod::Naive;
    if (x.equations.empty()) {
        res.count = points;
        res.wall_seconds = seconds_since(t0);
        return res;
    }

    // odometer over all coefficient tuples
    std::vector<unsigned> flat(e * m, 0);
    Int count = 0;
    while (true) {
        ++res.nodes_visited;
        std::vector<TruncatedSeries> pt;
        pt.reserve(m);
        for (std::size_t i = 0; i < m; ++i)
            pt.emplace_back(p, std::vector<unsigned>(flat.begin() + i * e,
                                                     flat.begin() + (i + 1) * e));
        bool ok = true;
        for (const auto& f : x.equations)
            if (!eval_series(f, pt).is_zero()) {
                ok = false;
                break;
            }
        if (ok) ++count;
        if (!odometer_next(flat, p)) break;
    }
    res.count = count;
    res.wall_seconds = seconds_since(t0);
    return res;
}

CountResult count_fiber(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                        unsigned k, FiberFilter filter, CountMethod method,
                        const Budget& budget, unsigned prime_floor,
                        const std::vector<FpPoint>* singular_set) {
    auto t0 = Clock::now();
    require_prime(p);
    if (k == 0) throw ValidationError("level k must be >= 1");
    AffineScheme fib = fiber_scheme(phi, y, p, k);

    std::set<FpPoint> allowed;
    const std::set<FpPoint>* allowed_ptr = nullptr;
    if (filter == FiberFilter::SingularReduction) {
        std::vector<FpPoint> sing;
        if (singular_set) {
            sing = *singular_set;
        } else {
            sing = singular_reduction_set(phi, p, prime_floor, budget);
        }
        allowed.insert(sing.begin(), sing.end());
        allowed_ptr = &allowed;
    }

    CountResult res;
    if (method == CountMethod::Naive) {
        res.method_used = CountMethod::Naive;
        NaiveSpec spec{fib.equations, allowed_ptr, p};
        res.count =
            naive_enumerate(spec, fib.vars.size(), int_pow(p, k), res.nodes_visited, budget);
    } else {
        res.method_used = CountMethod::Tree;
        TreeCounter tc(fib, p, k, budget, allowed_ptr);
        res.count = tc.run();
        res.nodes_visited = tc.nodes;
    }
    res.wall_seconds = seconds_since(t0);
    return res;
}

CountResult run_query(const CountQuery& q, const Budget& budget, unsigned prime_floor) {
    if (q.morphism)
        return count_fiber(*q.morphism, q.y, q.p, q.k, q.filter, q.method, budget,
                           prime_floor);
    if (q.filter == FiberFilter::SingularReduction)
        throw ValidationError("singular-reduction filter requires a morphism");
    if (q.method == CountMethod::Naive) return count_points_naive(q.scheme, q.p, q.k, budget);
    return count_points_tree(q.scheme, q.p, q.k, budget);
}

}  // namespace jetcount
