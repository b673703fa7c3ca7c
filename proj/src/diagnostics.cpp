#include "jetcount/diagnostics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "jetcount/residue.hpp"

namespace jetcount {

namespace {

bool y_less(const std::vector<Int>& a, const std::vector<Int>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool row_less(const GHRecord& a, const GHRecord& b) {
    if (a.p != b.p) return a.p < b.p;
    if (a.k != b.k) return a.k < b.k;
    return y_less(a.y, b.y);
}

std::uint64_t cell_seed(std::uint64_t seed, unsigned p, unsigned k) {
    // splitmix64 over (seed, p, k)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(p) * 131 + k);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// All target points mod p^k (ambient enumeration) when the ambient count is
// within cap; otherwise a seeded rejection sample of cap distinct points.
std::vector<std::vector<Int>> fiber_points(const PolyMorphism& phi, unsigned p, unsigned k,
                                           std::uint64_t cap, std::uint64_t seed,
                                           std::vector<std::string>& notes) {
    const std::size_t n = phi.target.vars.size();
    Int modulus = int_pow(p, k);
    Int ambient = int_pow(modulus, static_cast<unsigned long>(n));
    std::vector<std::vector<Int>> out;

    if (ambient <= cap) {
        std::vector<Int> y(n, 0);
        while (true) {
            bool ok = true;
            for (const auto& h : phi.target.equations)
                if (eval_mod(h, y, modulus) != 0) {
                    ok = false;
                    break;
                }
            if (ok) out.push_back(y);
            std::size_t i = n;
            bool carried = false;
            while (i > 0) {
                --i;
                if (++y[i] < modulus) {
                    carried = true;
                    break;
                }
                y[i] = 0;
            }
            if (!carried) break;
        }
        return out;
    }

    gmp_randstate_t rng;
    gmp_randinit_mt(rng);
    gmp_randseed_ui(rng, cell_seed(seed, p, k));
    std::set<std::vector<Int>> seen;
    std::uint64_t tries = 0;
    const std::uint64_t max_tries = cap * 256;
    Int coord;
    while (seen.size() < cap && tries < max_tries) {
        ++tries;
        std::vector<Int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            mpz_urandomm(coord.get_mpz_t(), rng, modulus.get_mpz_t());
            y[i] = coord;
        }
        bool ok = true;
        for (const auto& h : phi.target.equations)
            if (eval_mod(h, y, modulus) != 0) {
                ok = false;
                break;
            }
        if (ok) seen.insert(std::move(y));
    }
    gmp_randclear(rng);
    if (seen.size() < cap)
        notes.push_back("fiber sampling exhausted tries at p=" + std::to_string(p) +
                        ", k=" + std::to_string(k));
    out.assign(seen.begin(), seen.end());
    return out;
}

}  // namespace

GHTable scan_gh(const ScanSpec& spec) {
    if (spec.k_max < 1) throw ValidationError("k_max must be >= 1");
    for (unsigned p : spec.primes)
        if (p < 2) throw ValidationError("invalid prime " + std::to_string(p));

    GHTable table;
    table.spec = spec;
    for (unsigned p : spec.primes)
        if (p < spec.prime_floor) table.advisory_primes.push_back(p);

    // one singular set per prime, shared read-only by the workers; computed
    // with floor 2 so advisory primes still get table rows
    std::map<unsigned, std::vector<FpPoint>> singular_sets;
    for (unsigned p : spec.primes) {
        if (singular_sets.count(p)) continue;
        try {
            singular_sets[p] = singular_reduction_set(spec.morphism, p, 2, spec.budget);
        } catch (const BudgetError&) {
            table.truncated = true;
            table.notes.push_back("singular set refused by budget at p=" + std::to_string(p));
        }
    }

    struct Item {
        unsigned p, k;
        std::vector<Int> y;
    };
    std::vector<Item> items;
    std::set<unsigned> seen_primes;
    for (unsigned p : spec.primes) {
        if (!singular_sets.count(p)) continue;
        if (!seen_primes.insert(p).second) continue;
        for (unsigned k = 1; k <= spec.k_max; ++k)
            for (auto& y :
                 fiber_points(spec.morphism, p, k, spec.fiber_cap, spec.seed, table.notes))
                items.push_back(Item{p, k, std::move(y)});
    }

    std::vector<std::optional<GHRecord>> slots(items.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> truncated{false};
    std::mutex note_mutex;
    std::vector<std::string> worker_notes;

    unsigned jobs = std::max(1u, spec.jobs);
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size()) break;
            const Item& it = items[i];
            try {
                slots[i] = gh_record(spec.morphism, it.y, it.p, it.k, spec.method,
                                     spec.budget, spec.prime_floor, &singular_sets.at(it.p));
            } catch (const BudgetError& e) {
                truncated = true;
                std::lock_guard<std::mutex> lock(note_mutex);
                worker_notes.push_back("cell refused by budget at p=" + std::to_string(it.p) +
                                       ", k=" + std::to_string(it.k) + ": " + e.what());
            }
        }
    };
    if (jobs == 1 || items.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (truncated) table.truncated = true;
    std::sort(worker_notes.begin(), worker_notes.end());
    for (auto& n : worker_notes) table.notes.push_back(std::move(n));
    for (auto& s : slots)
        if (s) table.rows.push_back(std::move(*s));
    std::sort(table.rows.begin(), table.rows.end(), row_less);
    return table;
}

namespace {

bool is_advisory(const GHTable& t, unsigned p) {
    return std::find(t.advisory_primes.begin(), t.advisory_primes.end(), p) !=
           t.advisory_primes.end();
}

std::vector<const GHRecord*> verdict_rows(const GHTable& t) {
    std::vector<const GHRecord*> out;
    for (const auto& r : t.rows)
        if (!is_advisory(t, r.p)) out.push_back(&r);
    return out;
}

std::vector<Int> level1_label(const GHRecord& r) {
    std::vector<Int> out;
    out.reserve(r.y.size());
    for (const auto& yi : r.y) out.push_back(mod_floor(yi, Int(r.p)));
    return out;
}

RowKey key_of(const GHRecord& r) { return RowKey{r.p, r.k, r.y}; }

// Per-fiber maxima of a quantity across levels, for the geometric-growth
// scan: group by (p, level-1 label), then per k keep the max and its row.
struct FiberSeries {
    std::map<unsigned, std::pair<Rat, const GHRecord*>> by_k;
};

std::map<std::pair<unsigned, std::vector<Int>>,
         FiberSeries,
         bool (*)(const std::pair<unsigned, std::vector<Int>>&,
                  const std::pair<unsigned, std::vector<Int>>&)>
group_fibers(const std::vector<const GHRecord*>& rows, Rat GHRecord::*field) {
    auto less = +[](const std::pair<unsigned, std::vector<Int>>& a,
                    const std::pair<unsigned, std::vector<Int>>& b) {
        if (a.first != b.first) return a.first < b.first;
        return y_less(a.second, b.second);
    };
    std::map<std::pair<unsigned, std::vector<Int>>, FiberSeries, decltype(less)> groups(less);
    for (const GHRecord* r : rows) {
        auto key = std::make_pair(r->p, level1_label(*r));
        auto& series = groups[key].by_k;
        auto it = series.find(r->k);
        if (it == series.end() || r->*field > it->second.first)
            series[r->k] = {r->*field, r};
    }
    return groups;
}

struct GrowthWitness {
    const GHRecord* low = nullptr;
    const GHRecord* high = nullptr;
};

// Strictly geometric growth across levels: v(k2) > v(k1) > 0 with
// v(k2)^2 >= v(k1)^2 * p^(k2-k1), i.e. per-level ratio >= sqrt(p).
std::optional<GrowthWitness> detect_k_growth(const std::vector<const GHRecord*>& rows,
                                             Rat GHRecord::*field) {
    auto groups = group_fibers(rows, field);
    for (const auto& [key, series] : groups) {
        unsigned p = key.first;
        const auto& by_k = series.by_k;
        for (auto it1 = by_k.begin(); it1 != by_k.end(); ++it1) {
            if (it1->second.first <= 0) continue;
            for (auto it2 = std::next(it1); it2 != by_k.end(); ++it2) {
                const Rat& v1 = it1->second.first;
                const Rat& v2 = it2->second.first;
                if (!(v2 > v1)) continue;
                Rat lhs = v2 * v2;
                Rat rhs = v1 * v1 * rat_pow(Rat(p), static_cast<long>(it2->first - it1->first));
                if (lhs >= rhs)
                    return GrowthWitness{it1->second.second, it2->second.second};
            }
        }
    }
    return std::nullopt;
}

// Upward trend across primes at fixed k: the per-prime maxima are strictly
// increasing and the last step grows at least like sqrt(p).
bool detect_p_trend(const std::vector<const GHRecord*>& rows,
                    const std::map<std::pair<unsigned, unsigned>, Rat>& maxima,
                    unsigned k_max) {
    std::set<unsigned> primes;
    for (const GHRecord* r : rows) primes.insert(r->p);
    if (primes.size() < 2) return false;
    std::vector<unsigned> ps(primes.begin(), primes.end());
    for (unsigned k = 1; k <= k_max; ++k) {
        std::vector<std::pair<unsigned, Rat>> seq;
        for (unsigned p : ps) {
            auto it = maxima.find({p, k});
            if (it != maxima.end()) seq.emplace_back(p, it->second);
        }
        if (seq.size() < 2) continue;
        bool increasing = true;
        for (std::size_t i = 1; i < seq.size(); ++i)
            if (!(seq[i].second > seq[i - 1].second)) {
                increasing = false;
                break;
            }
        if (!increasing) continue;
        const auto& [p_lo, v_lo] = seq[seq.size() - 2];
        const auto& [p_hi, v_hi] = seq[seq.size() - 1];
        if (v_lo > 0 && v_hi * v_hi * Rat(p_lo) >= v_lo * v_lo * Rat(p_hi)) return true;
    }
    return false;
}

struct TrendReport {
    Rat C1;
    Rat C2;
    std::optional<GrowthWitness> g_growth;
    std::optional<GrowthWitness> h_growth;
    bool p_trend_h = false;
    bool p_trend_dg = false;
    std::vector<std::string> notes;
};

TrendReport analyze_trends(const GHTable& table) {
    TrendReport rep;
    auto rows = verdict_rows(table);

    // C1 = max h*p; per-(p,k) maxima feed the prime-trend rule
    std::map<std::pair<unsigned, unsigned>, Rat> h_maxima;
    for (const GHRecord* r : rows) {
        Rat hp = r->h * Rat(r->p);
        if (hp > rep.C1) rep.C1 = hp;
        auto key = std::make_pair(r->p, r->k);
        auto it = h_maxima.find(key);
        if (it == h_maxima.end() || hp > it->second) h_maxima[key] = hp;
    }

    // C2 = max |g(y,k) - g(r1(y),1)| * p over rows with a level-1 partner
    std::map<std::pair<unsigned, unsigned>, Rat> dg_maxima;
    std::map<std::pair<unsigned, std::vector<Int>>, const GHRecord*,
             bool (*)(const std::pair<unsigned, std::vector<Int>>&,
                      const std::pair<unsigned, std::vector<Int>>&)>
        level1(+[](const std::pair<unsigned, std::vector<Int>>& a,
                   const std::pair<unsigned, std::vector<Int>>& b) {
            if (a.first != b.first) return a.first < b.first;
            return y_less(a.second, b.second);
        });
    for (const GHRecord* r : rows)
        if (r->k == 1) level1[{r->p, r->y}] = r;
    bool missing_partner = false;
    for (const GHRecord* r : rows) {
        if (r->k < 2) continue;
        auto it = level1.find({r->p, level1_label(*r)});
        if (it == level1.end()) {
            missing_partner = true;
            continue;
        }
        Rat d = r->g - it->second->g;
        if (d < 0) d = -d;
        d *= Rat(r->p);
        if (d > rep.C2) rep.C2 = d;
        auto key = std::make_pair(r->p, r->k);
        auto jt = dg_maxima.find(key);
        if (jt == dg_maxima.end() || d > jt->second) dg_maxima[key] = d;
    }
    if (missing_partner)
        rep.notes.push_back("some rows lack a sampled level-1 partner; C2 is partial");

    rep.g_growth = detect_k_growth(rows, &GHRecord::g);
    rep.h_growth = detect_k_growth(rows, &GHRecord::h);
    rep.p_trend_h = detect_p_trend(rows, h_maxima, table.spec.k_max);
    rep.p_trend_dg = detect_p_trend(rows, dg_maxima, table.spec.k_max);
    return rep;
}

void require_coverage(const GHTable& table, std::size_t min_primes, unsigned min_kmax) {
    std::set<unsigned> primes;
    unsigned kmax = 0;
    for (const auto& r : table.rows)
        if (!is_advisory(table, r.p)) {
            primes.insert(r.p);
            kmax = std::max(kmax, r.k);
        }
    if (primes.size() < min_primes || kmax < min_kmax)
        throw ValidationError("insufficient coverage: need >= " +
                              std::to_string(min_primes) + " primes and k_max >= " +
                              std::to_string(min_kmax));
}

// h (or g) written as an exact power p^e; nullopt when not a pure power.
std::optional<long> pure_power_exponent(const Rat& v, unsigned p) {
    if (v <= 0) return std::nullopt;
    auto power_of = [&](const Int& z) -> std::optional<long> {
        Int t = z;
        long e = 0;
        while (t > 1) {
            if (!mpz_divisible_ui_p(t.get_mpz_t(), p)) return std::nullopt;
            mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), p);
            ++e;
        }
        return e;
    };
    auto en = power_of(v.get_num());
    auto ed = power_of(v.get_den());
    if (!en || !ed) return std::nullopt;
    return *en - *ed;
}

}  // namespace

Verdict frs_diagnostic(const GHTable& table) {
    require_coverage(table, 2, 2);
    TrendReport rep = analyze_trends(table);

    Verdict v;
    v.kind = "FRS";
    v.C1 = rep.C1;
    v.C2 = rep.C2;
    v.notes = rep.notes;
    if (rep.g_growth) {
        v.outcome = Outcome::Refuted;
        v.witnesses.push_back(key_of(*rep.g_growth->low));
        v.witnesses.push_back(key_of(*rep.g_growth->high));
        v.notes.push_back("geometric growth of g across levels (per-level ratio >= sqrt(p))");
    } else if (rep.p_trend_h || rep.p_trend_dg) {
        v.outcome = Outcome::Inconclusive;
        v.notes.push_back("per-prime maxima trend upward at least like sqrt(p)");
    } else {
        v.outcome = Outcome::Consistent;
    }
    return v;
}

Verdict esmooth_diagnostic(const GHTable& table) {
    auto rows = verdict_rows(table);

    Verdict v;
    v.kind = "E-smooth";
    TrendReport rep = analyze_trends(table);
    v.C1 = rep.C1;
    v.C2 = rep.C2;

    bool any_h = false;
    for (const GHRecord* r : rows)
        if (r->h > 0) any_h = true;
    if (!any_h) {
        v.outcome = Outcome::Smooth;
        v.E_infinite = true;
        v.notes.push_back("all h = 0: smooth convention, E = infinity");
        return v;
    }

    // classes are (k, exact y tuple); only classes seen with h > 0 at >= 2
    // primes participate in the fit
    struct Class {
        std::map<unsigned, const GHRecord*> by_prime;
    };
    std::map<std::pair<unsigned, std::string>, Class> classes;
    for (const GHRecord* r : rows) {
        if (!(r->h > 0)) continue;
        std::ostringstream label;
        for (std::size_t i = 0; i < r->y.size(); ++i)
            label << (i ? ":" : "") << r->y[i].get_str();
        auto& cls = classes[{r->k, label.str()}];
        auto it = cls.by_prime.find(r->p);
        if (it == cls.by_prime.end() || r->h > it->second->h) cls.by_prime[r->p] = r;
    }

    bool any_class = false;
    std::optional<Int> best;
    std::vector<RowKey> best_witnesses;
    for (const auto& [key, cls] : classes) {
        if (cls.by_prime.size() < 2) continue;
        any_class = true;
        std::vector<double> exps;
        bool all_exact = true;
        long exact_value = 0;
        bool first_exact = true;
        for (const auto& [p, r] : cls.by_prime) {
            auto e = pure_power_exponent(r->h, p);
            if (e) {
                exps.push_back(static_cast<double>(-*e));
                if (first_exact) {
                    exact_value = -*e;
                    first_exact = false;
                } else if (exact_value != -*e) {
                    all_exact = false;
                }
            } else {
                all_exact = false;
                double hv = mpq_get_d(r->h.get_mpq_t());
                exps.push_back(-std::log(hv) / std::log(static_cast<double>(p)));
            }
        }
        auto [lo, hi] = std::minmax_element(exps.begin(), exps.end());
        if (*hi - *lo > 0.2) {
            v.outcome = Outcome::Inconclusive;
            for (const auto& [p, r] : cls.by_prime) v.witnesses.push_back(key_of(*r));
            std::ostringstream note;
            note << "exponent disagreement beyond tolerance at k=" << key.first
                 << ", y=" << key.second << ": [" << *lo << ", " << *hi << "]";
            v.notes.push_back(note.str());
            return v;
        }
        double mean = 0;
        for (double e : exps) mean += e;
        mean /= static_cast<double>(exps.size());
        Int fitted(all_exact ? exact_value : static_cast<long>(std::llround(mean)));
        if (!best || fitted < *best) {
            best = fitted;
            best_witnesses.clear();
            for (const auto& [p, r] : cls.by_prime) best_witnesses.push_back(key_of(*r));
        }
    }
    if (!any_class)
        throw ValidationError(
            "insufficient coverage: no (k, y) class has h > 0 at two or more primes");

    if (*best < 1) {
        // h fails the minimal E = 1 decay, so no E >= 1 can hold
        v.outcome = Outcome::Refuted;
        v.witnesses = best_witnesses;
        v.notes.push_back("observed h ~ p^(" + Int(-*best).get_str() +
                          "); not E-smooth for any E >= 1");
        return v;
    }
    v.outcome = Outcome::Consistent;
    v.fitted_E = best;
    v.witnesses = best_witnesses;
    v.notes.push_back("FRS-consistent (E >= 1)");
    if (*best >= 2) v.notes.push_back("terminal-consistent (E >= 2)");
    return v;
}

Verdict jetflat_diagnostic(const GHTable& table, unsigned dim_y) {
    if (table.rows.empty()) throw ValidationError("empty table");
    if (dim_y == 0) throw ValidationError("dim Y must be >= 1");
    auto rows = verdict_rows(table);

    // require the k-series of at least one fiber
    {
        std::set<std::pair<unsigned, std::string>> fibers_multi;
        std::map<std::pair<unsigned, std::string>, std::set<unsigned>> ks;
        for (const GHRecord* r : rows) {
            std::ostringstream label;
            for (const auto& yi : level1_label(*r)) label << yi.get_str() << ":";
            ks[{r->p, label.str()}].insert(r->k);
        }
        bool ok = false;
        for (const auto& [key, s] : ks)
            if (s.size() >= 2) ok = true;
        if (!ok && table.spec.k_max >= 2)
            throw ValidationError("table contains no k-series of any fiber");
    }

    Verdict v;
    v.kind = "jet-flat";
    TrendReport rep = analyze_trends(table);
    v.C1 = rep.C1;
    v.C2 = rep.C2;

    Rat pure_max(0);
    Rat bracket_max(0);
    const GHRecord* arg = nullptr;
    std::size_t flagged = 0;
    for (const GHRecord* r : rows) {
        if (!(r->g > 1)) continue;
        Rat denom = Rat(static_cast<unsigned long>(r->k) * dim_y);
        auto e = pure_power_exponent(r->g, r->p);
        if (e) {
            Rat ratio = Rat(*e) / denom;
            if (ratio > pure_max) {
                pure_max = ratio;
                arg = r;
            }
        } else {
            // flagged row: bracket log_p(g) above by a half-integer, exactly
            long fl = 0;
            Rat pw(1);
            while (pw * Rat(r->p) <= r->g) {
                pw *= Rat(r->p);
                ++fl;
            }
            Rat hi_exp = (r->g * r->g < pw * pw * Rat(r->p)) ? Rat(2 * fl + 1, 2)
                                                             : Rat(fl + 1);
            Rat hi = hi_exp / denom;
            if (hi > bracket_max) bracket_max = hi;
            ++flagged;
        }
    }

    v.epsilon = Rat(1) - pure_max;
    v.epsilon_exact = true;
    if (flagged > 0) {
        v.notes.push_back(std::to_string(flagged) +
                          " row(s) with non-pure-power g flagged instead of fitted");
        if (bracket_max > pure_max) {
            v.epsilon_int_lo = Rat(1) - bracket_max;
            v.epsilon_exact = false;
        }
    }
    v.outcome = Outcome::Consistent;
    if (arg) v.witnesses.push_back(key_of(*arg));
    if (*v.epsilon == 1 && v.epsilon_exact && !rep.h_growth && !rep.p_trend_h)
        v.notes.push_back("jet-flat-consistent");
    return v;
}

std::string table_to_csv(const GHTable& table) {
    std::ostringstream out;
    out << gh_csv_header() << "\n";
    for (const auto& r : table.rows) out << gh_csv_row(r) << "\n";
    return out.str();
}

namespace {

nlohmann::ordered_json rat_json(const Rat& r) {
    return {{"num", r.get_num().get_str()}, {"den", r.get_den().get_str()}};
}

nlohmann::ordered_json key_json(const RowKey& k) {
    std::ostringstream y;
    for (std::size_t i = 0; i < k.y.size(); ++i) y << (i ? ":" : "") << k.y[i].get_str();
    return {{"p", k.p}, {"k", k.k}, {"y", y.str()}};
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Consistent: return "consistent";
        case Outcome::Refuted: return "refuted";
        case Outcome::Inconclusive: return "inconclusive";
        case Outcome::Smooth: return "smooth";
    }
    return "inconclusive";
}

const char* method_name(CountMethod m) {
    switch (m) {
        case CountMethod::Naive: return "naive";
        case CountMethod::Tree: return "tree";
        case CountMethod::Auto: return "auto";
    }
    return "auto";
}

}  // namespace

std::string verdict_to_json_text(const Verdict& v, const GHTable& table) {
    nlohmann::ordered_json j;
    j["kind"] = v.kind;
    j["outcome"] = outcome_name(v.outcome);
    if (v.E_infinite) {
        j["fitted"] = {{"E", "infinity"}};
    } else if (v.fitted_E) {
        j["fitted"] = {{"E", {{"num", v.fitted_E->get_str()}, {"den", "1"}}}};
    } else if (v.epsilon) {
        j["fitted"] = {{"epsilon", rat_json(*v.epsilon)}};
        if (v.epsilon_int_lo)
            j["fitted"]["epsilon_interval"] = {{"lo", rat_json(*v.epsilon_int_lo)},
                                               {"hi", rat_json(*v.epsilon)}};
    } else {
        j["fitted"] = nullptr;
    }
    j["constants"] = {{"C1", rat_json(v.C1)}, {"C2", rat_json(v.C2)}};
    j["witnesses"] = nlohmann::ordered_json::array();
    for (const auto& w : v.witnesses) j["witnesses"].push_back(key_json(w));
    j["notes"] = v.notes;
    j["scan"] = {{"label", table.spec.label},
                 {"primes", table.spec.primes},
                 {"k_max", table.spec.k_max},
                 {"cap", table.spec.fiber_cap},
                 {"seed", table.spec.seed},
                 {"budget", table.spec.budget.limit},
                 {"prime_floor", table.spec.prime_floor},
                 {"method", method_name(table.spec.method)},
                 {"jobs", table.spec.jobs},
                 {"truncated", table.truncated},
                 {"advisory_primes", table.advisory_primes}};
    return j.dump(2) + "\n";
}

}  // namespace jetcount
