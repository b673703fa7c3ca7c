#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "jetcount/diagnostics.hpp"
#include "jetcount/presburger.hpp"
#include "jetcount/residue.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace jetcount;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file '" + path.string() + "'");
    out << content;
}

CountMethod parse_method(const std::string& name) {
    if (name == "naive") return CountMethod::Naive;
    if (name == "tree") return CountMethod::Tree;
    if (name == "auto") return CountMethod::Auto;
    throw ValidationError("unknown method '" + name + "' (naive|tree|auto)");
}

Rat parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(text));
        Rat r(Int(text.substr(0, slash)), Int(text.substr(slash + 1)));
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw ValidationError("malformed rational '" + text + "'");
    }
}

std::vector<Int> parse_point(const std::string& text) {
    std::vector<Int> out;
    std::string cur;
    for (char c : text + ":") {
        if (c == ':') {
            if (cur.empty()) throw ValidationError("empty coordinate in point '" + text + "'");
            out.emplace_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    return out;
}

const AffineScheme& find_scheme(const DefinitionFile& defs, const std::string& name) {
    auto it = defs.schemes.find(name);
    if (it == defs.schemes.end())
        throw ValidationError("no scheme named '" + name + "' in the definition file");
    return it->second;
}

const PolyMorphism& find_morphism(const DefinitionFile& defs, const std::string& name) {
    auto it = defs.morphisms.find(name);
    if (it == defs.morphisms.end())
        throw ValidationError("no morphism named '" + name + "' in the definition file");
    return it->second;
}

struct ScanOpts {
    std::string file;
    std::string morphism;
    std::vector<unsigned> primes;
    unsigned kmax = 2;
    std::uint64_t cap = 200;
    std::uint64_t seed = 0;
    std::uint64_t budget = 100000000;
    unsigned floor = 3;
    unsigned jobs = 0;  // 0 = machine parallelism
    std::string method = "auto";
    std::string out = "out";
};

void add_scan_options(CLI::App* cmd, ScanOpts& o) {
    cmd->add_option("--file", o.file, "scheme/morphism definition file")->required();
    cmd->add_option("--morphism", o.morphism, "morphism section name")->required();
    cmd->add_option("--primes", o.primes, "primes to scan")->required()->delimiter(',');
    cmd->add_option("--kmax", o.kmax, "largest level k");
    cmd->add_option("--cap", o.cap, "fiber cap per (p,k) cell");
    cmd->add_option("--seed", o.seed, "sampling seed");
    cmd->add_option("--budget", o.budget, "work budget in evaluation steps");
    cmd->add_option("--prime-floor", o.floor, "verdict prime floor");
    cmd->add_option("--jobs", o.jobs, "worker threads (0 = machine parallelism)");
    cmd->add_option("--method", o.method, "naive|tree|auto");
    cmd->add_option("--out", o.out, "output directory");
}

ScanSpec to_spec(const ScanOpts& o) {
    auto defs = parse_definition_file(read_file(o.file));
    const PolyMorphism& phi = find_morphism(defs, o.morphism);
    validate_morphism(phi);
    ScanSpec spec;
    spec.morphism = phi;
    spec.label = o.morphism;
    spec.primes = o.primes;
    spec.k_max = o.kmax;
    spec.fiber_cap = o.cap;
    spec.seed = o.seed;
    spec.budget = Budget{o.budget};
    spec.prime_floor = o.floor;
    spec.method = parse_method(o.method);
    spec.jobs = o.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.jobs;
    return spec;
}

ordered_json config_echo(const std::string& subcommand, const ScanOpts& o) {
    return ordered_json{{"subcommand", subcommand},
                        {"file", o.file},
                        {"morphism", o.morphism},
                        {"primes", o.primes},
                        {"kmax", o.kmax},
                        {"cap", o.cap},
                        {"seed", o.seed},
                        {"budget", o.budget},
                        {"prime_floor", o.floor},
                        {"jobs", o.jobs},
                        {"method", o.method}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jet prolongations, Z/p^k point counts, and g/h diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config")->configurable(false);

    // ---- jet ----
    struct {
        std::string file, scheme, morphism;
        unsigned k = 1;
    } jet_opts;
    auto* jet_cmd = app.add_subcommand("jet", "emit the equations of J_k")->configurable();
    jet_cmd->add_option("--file", jet_opts.file)->required();
    jet_cmd->add_option("--scheme", jet_opts.scheme, "scheme section to prolong");
    jet_cmd->add_option("--morphism", jet_opts.morphism, "morphism section to prolong");
    jet_cmd->add_option("--k", jet_opts.k, "jet level")->required();

    // ---- count ----
    struct {
        std::string file, scheme, method = "auto", ring = "zpk";
        unsigned p = 3, k = 1;
        std::uint64_t budget = 100000000;
    } count_opts;
    auto* count_cmd = app.add_subcommand("count", "count scheme points over Z/p^k or F_p[t]/(t^e)")->configurable();
    count_cmd->add_option("--file", count_opts.file)->required();
    count_cmd->add_option("--scheme", count_opts.scheme)->required();
    count_cmd->add_option("-p,--prime", count_opts.p)->required();
    count_cmd->add_option("-k,--level", count_opts.k,
                          "level k (truncation length e for --ring tseries)")->required();
    count_cmd->add_option("--method", count_opts.method, "naive|tree|auto");
    count_cmd->add_option("--ring", count_opts.ring, "zpk|tseries");
    count_cmd->add_option("--budget", count_opts.budget);

    // ---- fiber ----
    struct {
        std::string file, morphism, y, filter = "all", method = "auto";
        unsigned p = 3, k = 1, floor = 3;
        std::uint64_t budget = 100000000;
    } fiber_opts;
    auto* fiber_cmd = app.add_subcommand("fiber", "count one morphism fiber over Z/p^k")->configurable();
    fiber_cmd->add_option("--file", fiber_opts.file)->required();
    fiber_cmd->add_option("--morphism", fiber_opts.morphism)->required();
    fiber_cmd->add_option("-y,--point", fiber_opts.y, "target point, colon-separated")->required();
    fiber_cmd->add_option("-p,--prime", fiber_opts.p)->required();
    fiber_cmd->add_option("-k,--level", fiber_opts.k)->required();
    fiber_cmd->add_option("--filter", fiber_opts.filter, "all|singular");
    fiber_cmd->add_option("--method", fiber_opts.method, "naive|tree|auto");
    fiber_cmd->add_option("--budget", fiber_opts.budget);
    fiber_cmd->add_option("--prime-floor", fiber_opts.floor);

    // ---- table / diagnose ----
    ScanOpts table_opts;
    auto* table_cmd = app.add_subcommand("table", "scan a (p,k,y) grid into a g/h CSV table")->configurable();
    add_scan_options(table_cmd, table_opts);

    ScanOpts diag_opts;
    auto* diag_cmd =
        app.add_subcommand("diagnose", "scan and render FRS / E-smooth / jet-flat verdicts")
            ->configurable();
    add_scan_options(diag_cmd, diag_opts);

    // ---- presburger ----
    struct {
        std::string expr, file, op = "eval", q = "2", s = "0";
    } pres_opts;
    auto* pres_cmd =
        app.add_subcommand("presburger", "evaluate/classify/sup a constructible function")
            ->configurable();
    pres_cmd->add_option("--expr", pres_opts.expr, "constructible function text");
    pres_cmd->add_option("--file", pres_opts.file, "file holding the function text");
    pres_cmd->add_option("--op", pres_opts.op, "eval|classify|sup");
    pres_cmd->add_option("-q,--base", pres_opts.q, "rational base q > 1");
    pres_cmd->add_option("-s,--arg", pres_opts.s, "integer argument s");

    try {
        app.parse(argc, argv);

        if (jet_cmd->parsed()) {
            auto defs = parse_definition_file(read_file(jet_opts.file));
            if (jet_opts.scheme.empty() == jet_opts.morphism.empty())
                throw ValidationError("give exactly one of --scheme / --morphism");
            if (!jet_opts.scheme.empty()) {
                auto jet = jet_prolong(find_scheme(defs, jet_opts.scheme), jet_opts.k);
                for (const auto& f : jet.scheme.equations)
                    std::cout << f.to_string() << "\n";
            } else {
                const auto& phi = find_morphism(defs, jet_opts.morphism);
                validate_morphism(phi);
                auto jet = jet_morphism(phi, jet_opts.k);
                for (const auto& f : jet.morphism->components)
                    std::cout << f.to_string() << "\n";
            }
            return 0;
        }

        if (count_cmd->parsed()) {
            auto defs = parse_definition_file(read_file(count_opts.file));
            const auto& scheme = find_scheme(defs, count_opts.scheme);
            Budget budget{count_opts.budget};
            CountResult res;
            if (count_opts.ring == "tseries") {
                res = count_points_jetring(scheme, count_opts.p, count_opts.k, budget);
            } else if (count_opts.ring == "zpk") {
                switch (parse_method(count_opts.method)) {
                    case CountMethod::Naive:
                        res = count_points_naive(scheme, count_opts.p, count_opts.k, budget);
                        break;
                    default:
                        res = count_points_tree(scheme, count_opts.p, count_opts.k, budget);
                }
            } else {
                throw ValidationError("unknown ring '" + count_opts.ring + "' (zpk|tseries)");
            }
            std::cout << res.count.get_str() << "\n";
            return 0;
        }

        if (fiber_cmd->parsed()) {
            auto defs = parse_definition_file(read_file(fiber_opts.file));
            const auto& phi = find_morphism(defs, fiber_opts.morphism);
            validate_morphism(phi);
            FiberFilter filter;
            if (fiber_opts.filter == "all")
                filter = FiberFilter::All;
            else if (fiber_opts.filter == "singular")
                filter = FiberFilter::SingularReduction;
            else
                throw ValidationError("unknown filter '" + fiber_opts.filter +
                                      "' (all|singular)");
            auto res = count_fiber(phi, parse_point(fiber_opts.y), fiber_opts.p, fiber_opts.k,
                                   filter, parse_method(fiber_opts.method),
                                   Budget{fiber_opts.budget}, fiber_opts.floor);
            std::cout << res.count.get_str() << "\n";
            return 0;
        }

        if (table_cmd->parsed() || diag_cmd->parsed()) {
            bool diagnose = diag_cmd->parsed();
            const ScanOpts& o = diagnose ? diag_opts : table_opts;
            ScanSpec spec = to_spec(o);
            GHTable table = scan_gh(spec);

            fs::create_directories(o.out);
            write_file(fs::path(o.out) / "gh.csv", table_to_csv(table));
            write_file(fs::path(o.out) / "config.json",
                       config_echo(diagnose ? "diagnose" : "table", o).dump(2) + "\n");
            if (diagnose) {
                std::string verdicts = "[\n";
                auto append = [&](const Verdict& v, bool last) {
                    std::istringstream lines(verdict_to_json_text(v, table));
                    std::string line, block;
                    while (std::getline(lines, line)) block += "  " + line + "\n";
                    block.pop_back();
                    verdicts += block + (last ? "\n" : ",\n");
                };
                append(frs_diagnostic(table), false);
                append(esmooth_diagnostic(table), false);
                append(jetflat_diagnostic(table, spec.morphism.target.declared_dim), true);
                verdicts += "]\n";
                write_file(fs::path(o.out) / "verdicts.json", verdicts);
            }
            if (table.truncated)
                std::cerr << "warning: table truncated by budget\n";
            std::cout << "wrote " << (fs::path(o.out) / "gh.csv").string() << "\n";
            if (diagnose)
                std::cout << "wrote " << (fs::path(o.out) / "verdicts.json").string() << "\n";
            return 0;
        }

        if (pres_cmd->parsed()) {
            std::string text = pres_opts.expr;
            if (text.empty() && !pres_opts.file.empty()) text = read_file(pres_opts.file);
            if (text.empty()) throw ValidationError("give --expr or --file");
            auto f = parse_constructible(text);
            Rat q = parse_rational(pres_opts.q);
            if (pres_opts.op == "eval") {
                std::cout << eval_constructible(f, q, Int(pres_opts.s)).get_str() << "\n";
            } else if (pres_opts.op == "classify") {
                auto rep = classify_nonneg(f);
                switch (rep.answer) {
                    case NonnegAnswer::Yes:
                        std::cout << "yes\n";
                        break;
                    case NonnegAnswer::Unknown:
                        std::cout << "unknown\n";
                        break;
                    case NonnegAnswer::Counterexample:
                        std::cout << "counterexample s=" << rep.s.get_str()
                                  << " q=" << rep.q.get_str()
                                  << " value=" << rep.value.get_str() << "\n";
                        break;
                }
            } else if (pres_opts.op == "sup") {
                auto res = sup_over_domain(f, q);
                if (res.bounded)
                    std::cout << "bounded sup=" << res.sup.get_str()
                              << " argmax=" << res.argmax.get_str() << "\n";
                else
                    std::cout << "unbounded witness_term=" << res.witness_term << " s(10^6)="
                              << unbounded_witness_s(f, q, res.witness_term, Rat(1000000))
                                     .get_str()
                              << "\n";
            } else {
                throw ValidationError("unknown op '" + pres_opts.op + "' (eval|classify|sup)");
            }
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
