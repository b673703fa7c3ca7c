#include "jetcount/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jetcount {

namespace {

Rat normalize(const Int& count, unsigned p, unsigned k, long d) {
    // count / p^(k*d), exact for either sign of d
    return Rat(count) / rat_pow(Rat(p), static_cast<long>(k) * d);
}

void require_primes(const std::vector<unsigned>& primes, std::size_t min_count,
                    unsigned floor) {
    if (primes.size() < min_count)
        throw ValidationError("need at least " + std::to_string(min_count) + " primes");
    for (unsigned p : primes) require_prime(p);
    for (unsigned p : primes)
        if (p < floor)
            throw ValidationError("prime " + std::to_string(p) +
                                  " below configured floor " + std::to_string(floor));
}

}  // namespace

GHRecord gh_record(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p,
                   unsigned k, CountMethod method, const Budget& budget,
                   unsigned prime_floor, const std::vector<FpPoint>* singular_set) {
    GHRecord rec;
    rec.p = p;
    rec.k = k;
    rec.y = y;
    rec.raw_count =
        count_fiber(phi, y, p, k, FiberFilter::All, method, budget, prime_floor).count;
    rec.singular_count = count_fiber(phi, y, p, k, FiberFilter::SingularReduction, method,
                                     budget, prime_floor, singular_set)
                             .count;
    long d = phi.relative_dim();
    rec.g = normalize(rec.raw_count, p, k, d);
    rec.h = normalize(rec.singular_count, p, k, d);
    return rec;
}

Rat g_value(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p, unsigned k,
            CountMethod method, const Budget& budget) {
    Int c = count_fiber(phi, y, p, k, FiberFilter::All, method, budget).count;
    return normalize(c, p, k, phi.relative_dim());
}

Rat h_value(const PolyMorphism& phi, const std::vector<Int>& y, unsigned p, unsigned k,
            CountMethod method, const Budget& budget, unsigned prime_floor) {
    Int c = count_fiber(phi, y, p, k, FiberFilter::SingularReduction, method, budget,
                        prime_floor)
                .count;
    return normalize(c, p, k, phi.relative_dim());
}

ComponentEstimate estimate_components(const AffineScheme& z, std::vector<unsigned> primes,
                                      const Budget& budget, unsigned prime_floor) {
    require_primes(primes, 3, prime_floor);
    std::sort(primes.begin(), primes.end());

    ComponentEstimate est;
    est.primes = primes;
    for (unsigned p : primes) {
        Int c = count_points_naive(z, p, 1, budget).count;
        est.ratios.push_back(Rat(c) / rat_pow(Rat(p), static_cast<long>(z.declared_dim)));
    }
    const Rat& r = est.ratios.back();  // largest prime
    // C = floor(r + 1/2); a ratio exactly halfway between integers is a tie
    Rat shifted = r + Rat(1, 2);
    Int c_round;
    mpz_fdiv_q(c_round.get_mpz_t(), shifted.get_num().get_mpz_t(),
               shifted.get_den().get_mpz_t());
    est.C = c_round;
    bool tie = shifted.get_den() == 1;  // ratio exactly halfway between integers
    bool within = true;
    for (const Rat& ri : est.ratios) {
        Rat dev = ri - Rat(est.C);
        if (dev < 0) dev = -dev;
        if (!(dev < Rat(1, 2))) within = false;
    }
    est.stable = within && !tie;
    return est;
}

DimensionEstimate estimate_dimension(const AffineScheme& z, std::vector<unsigned> primes,
                                     const Budget& budget, unsigned prime_floor) {
    require_primes(primes, 2, prime_floor);
    std::sort(primes.begin(), primes.end());

    DimensionEstimate est;
    std::vector<double> xs, ys;
    for (unsigned p : primes) {
        Int c = count_points_naive(z, p, 1, budget).count;
        if (c == 0) {
            est.lower_bound_only = true;
            continue;
        }
        xs.push_back(std::log(static_cast<double>(p)));
        ys.push_back(std::log(mpz_get_d(c.get_mpz_t())));
    }
    if (xs.size() < 2) {
        est.slope = std::numeric_limits<double>::quiet_NaN();
        est.lower_bound_only = true;
        return est;
    }
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    est.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - est.slope * sx) / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (est.slope * xs[i] + intercept);
        est.residual += r * r;
    }
    return est;
}

LangWeilReport langweil_check(const AffineScheme& z, const Int& C,
                              std::vector<unsigned> primes, const Budget& budget,
                              unsigned prime_floor) {
    require_primes(primes, 3, prime_floor);
    std::sort(primes.begin(), primes.end());

    LangWeilReport rep;
    rep.C = C;
    for (unsigned p : primes) {
        LangWeilRow row;
        row.p = p;
        row.count = count_points_naive(z, p, 1, budget).count;
        row.ratio = Rat(row.count) / rat_pow(Rat(p), static_cast<long>(z.declared_dim));
        row.deviation = row.ratio - Rat(C);
        if (row.deviation < 0) row.deviation = -row.deviation;
        row.scaled = mpq_get_d(row.deviation.get_mpq_t()) * std::sqrt(static_cast<double>(p));
        rep.max_scaled = std::max(rep.max_scaled, row.scaled);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::string gh_csv_header() {
    return "p,k,y,raw_count,singular_count,g_num,g_den,h_num,h_den";
}

std::string gh_csv_row(const GHRecord& r) {
    std::ostringstream out;
    out << r.p << "," << r.k << ",";
    for (std::size_t i = 0; i < r.y.size(); ++i)
        out << (i ? ":" : "") << r.y[i].get_str();
    out << "," << r.raw_count.get_str() << "," << r.singular_count.get_str() << ","
        << r.g.get_num().get_str() << "," << r.g.get_den().get_str() << ","
        << r.h.get_num().get_str() << "," << r.h.get_den().get_str();
    return out.str();
}

}  // namespace jetcount
