#include "config.hpp"
#include "report.hpp"

#include "lvbarrier.h"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace lvbcli;

struct Failure {
    int code;
    std::string message;
};

void check(lvb_status s) {
    if (s != LVB_OK) throw Failure{lvb_status_is_validation(s) ? 1 : 2, lvb_last_error()};
}

struct ModelDel {
    void operator()(lvb_model m) const { lvb_model_free(m); }
};
struct ContractDel {
    void operator()(lvb_contract c) const { lvb_contract_free(c); }
};
struct ProfileDel {
    void operator()(lvb_profile p) const { lvb_profile_free(p); }
};
using Model = std::unique_ptr<lvb_model_s, ModelDel>;
using Contract = std::unique_ptr<lvb_contract_s, ContractDel>;
using Profile = std::unique_ptr<lvb_profile_s, ProfileDel>;

struct Session {
    Model model;
    Contract contract;
    lvb_regime regime = LVB_REGIME_L1;
    std::vector<std::string> warnings;
};

lvb_barrier_kind barrier_kind(const BarrierSpec& b) {
    return b.type == "exponential" ? LVB_BARRIER_EXPONENTIAL : LVB_BARRIER_CONSTANT;
}

Session open_session(const RunConfig& cfg) {
    Session s;
    lvb_model m = nullptr;
    const ModelSpec& ms = cfg.model;
    check(ms.type == "cev" ? lvb_model_cev(ms.rate, ms.dividend, ms.sigma0, ms.rho, &m)
                           : lvb_model_gbm(ms.rate, ms.dividend, ms.sigma, &m));
    s.model.reset(m);

    lvb_contract c = nullptr;
    check(lvb_contract_create(cfg.contract.maturity, ms.rate, ms.dividend, &c));
    s.contract.reset(c);
    if (const auto& b = cfg.contract.lower)
        check(lvb_contract_set_barrier(c, LVB_SIDE_LOWER, barrier_kind(*b), b->level, b->growth));
    if (const auto& b = cfg.contract.upper)
        check(lvb_contract_set_barrier(c, LVB_SIDE_UPPER, barrier_kind(*b), b->level, b->growth));

    const PayoffSpec& p = cfg.contract.payoff;
    if (p.type == "call") check(lvb_contract_set_payoff(c, LVB_PAYOFF_CALL, p.strike, 0, 0));
    else if (p.type == "put") check(lvb_contract_set_payoff(c, LVB_PAYOFF_PUT, p.strike, 0, 0));
    else if (p.type == "smooth_bump") check(lvb_contract_set_payoff(c, LVB_PAYOFF_SMOOTH_BUMP, p.left, p.right, p.height));
    else check(lvb_contract_set_payoff(c, LVB_PAYOFF_DOUBLE_NO_TOUCH, 0, 0, 0));

    size_t nw = 0;
    check(lvb_contract_validate(c, &s.regime, &nw));
    if (cfg.run.smoothing) {
        check(lvb_contract_smooth_payoff(c, *cfg.run.smoothing));
        check(lvb_contract_validate(c, &s.regime, &nw));
    }
    for (size_t i = 0; i < nw; ++i) s.warnings.emplace_back(lvb_contract_warning(c, i));
    return s;
}

lvb_method method_of(const std::string& m) {
    if (m == "volterra") return LVB_METHOD_VOLTERRA;
    if (m == "laplace") return LVB_METHOD_LAPLACE;
    return LVB_METHOD_AUTO;
}

const char* method_name(lvb_method m) {
    switch (m) {
    case LVB_METHOD_VOLTERRA: return "volterra";
    case LVB_METHOD_LAPLACE: return "laplace";
    default: return "auto";
    }
}

const char* regime_name(lvb_regime r) { return r == LVB_REGIME_SMOOTH ? "smooth_regime" : "L1_regime"; }

Profile solve(const Session& s, int n, const std::string& method) {
    lvb_profile p = nullptr;
    check(lvb_solve(s.model.get(), s.contract.get(), n, method_of(method), &p));
    return Profile(p);
}

void require_spots(const RunConfig& cfg) {
    if (cfg.run.spots.empty()) throw ConfigError("run.spots must list at least one spot");
}

Report base_report(const std::string& command, const Session& s, lvb_profile p, int n) {
    Report r;
    r.command = command;
    lvb_method used = LVB_METHOD_AUTO;
    if (p) check(lvb_profile_method(p, &used));
    r.meta.emplace_back("regime", std::string(regime_name(s.regime)));
    if (p) {
        r.meta.emplace_back("method", std::string(method_name(used)));
        r.meta.emplace_back("n", static_cast<std::int64_t>(n));
    }
    r.warnings = s.warnings;
    return r;
}

Report cmd_price(const RunConfig& cfg) {
    require_spots(cfg);
    const Session s = open_session(cfg);
    const Profile p = solve(s, cfg.run.n, cfg.run.method);
    Report r = base_report("price", s, p.get(), cfg.run.n);
    r.table.columns = {"spot", "european", "premium_lower", "premium_upper", "price",
                       "discount_factor", "discounted_price", "near_expiry_unreliable"};
    for (double spot : cfg.run.spots) {
        lvb_price_result pr{};
        check(lvb_price(s.model.get(), s.contract.get(), p.get(), spot, &pr));
        r.table.rows.push_back({spot, pr.european, pr.premium_lower, pr.premium_upper, pr.price, pr.discount_factor,
                                pr.discounted_price, pr.near_expiry_unreliable != 0});
    }
    return r;
}

Report cmd_ladder(const RunConfig& cfg) {
    require_spots(cfg);
    const Session s = open_session(cfg);
    const Profile p = solve(s, cfg.run.n, cfg.run.method);
    Report r = base_report("ladder", s, p.get(), cfg.run.n);
    const auto& spots = cfg.run.spots;
    std::vector<double> prices(spots.size()), deltas(spots.size()), gammas(spots.size());
    check(lvb_ladder(s.model.get(), s.contract.get(), p.get(), spots.data(), spots.size(), prices.data(),
                     deltas.data(), gammas.data()));
    r.table.columns = {"spot", "price", "delta", "gamma"};
    for (std::size_t i = 0; i < spots.size(); ++i) r.table.rows.push_back({spots[i], prices[i], deltas[i], gammas[i]});
    return r;
}

Report cmd_deltas(const RunConfig& cfg) {
    const Session s = open_session(cfg);
    const Profile p = solve(s, cfg.run.n, cfg.run.method);
    Report r = base_report("deltas", s, p.get(), cfg.run.n);
    size_t nodes = 0;
    check(lvb_profile_size(p.get(), &nodes));
    std::vector<double> t(nodes), up(nodes, NAN), lo(nodes, NAN);
    std::vector<int> ok(nodes);
    check(lvb_profile_times(p.get(), t.data()));
    int has = 0;
    check(lvb_profile_has(p.get(), LVB_SIDE_UPPER, &has));
    if (has) check(lvb_profile_deltas(p.get(), LVB_SIDE_UPPER, up.data()));
    check(lvb_profile_has(p.get(), LVB_SIDE_LOWER, &has));
    if (has) check(lvb_profile_deltas(p.get(), LVB_SIDE_LOWER, lo.data()));
    check(lvb_profile_reliable(p.get(), ok.data()));
    int violations = 0, unreliable = 0;
    double scale = 0.0;
    check(lvb_profile_diagnostics(p.get(), &violations, &unreliable, &scale));
    r.meta.emplace_back("sign_violations", static_cast<std::int64_t>(violations));
    r.meta.emplace_back("near_expiry_unreliable", unreliable != 0);
    r.table.columns = {"t", "delta_plus", "delta_minus", "reliable"};
    for (size_t i = 0; i < nodes; ++i) r.table.rows.push_back({t[i], up[i], lo[i], ok[i] != 0});
    return r;
}

struct Sample {
    int n;
    double price;
    Profile profile;
};

// Max |Delta_n - Delta_ref| over the nodes of the coarse profile before expiry.
double profile_gap(const Sample& coarse, const Sample& ref) {
    size_t nodes = 0;
    check(lvb_profile_size(coarse.profile.get(), &nodes));
    std::vector<double> t(nodes);
    check(lvb_profile_times(coarse.profile.get(), t.data()));
    double gap = 0.0;
    for (lvb_side side : {LVB_SIDE_UPPER, LVB_SIDE_LOWER}) {
        int has = 0;
        check(lvb_profile_has(coarse.profile.get(), side, &has));
        if (!has) continue;
        std::vector<double> v(nodes);
        check(lvb_profile_deltas(coarse.profile.get(), side, v.data()));
        for (size_t i = 0; i + 1 < nodes; ++i) {
            double plus = 0.0, minus = 0.0;
            check(lvb_delta_at_barrier(ref.profile.get(), t[i], &plus, &minus, nullptr));
            gap = std::max(gap, std::fabs(v[i] - (side == LVB_SIDE_UPPER ? plus : minus)));
        }
    }
    return gap;
}

Cell order(double e0, double e1, int n0, int n1, double floor) {
    if (!(e0 > floor) || !(e1 > floor)) return std::string("n/a");
    return std::log(e0 / e1) / std::log(static_cast<double>(n1) / n0);
}

Report cmd_convergence(const RunConfig& cfg, std::vector<int> n_list) {
    require_spots(cfg);
    if (n_list.empty()) n_list = cfg.run.n_list;
    if (n_list.empty()) n_list = {32, 64, 128, 256, 1024};
    if (n_list.size() < 2) throw ConfigError("convergence needs at least two grid sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1]) throw ConfigError("grid sizes must be strictly ascending");

    const Session s = open_session(cfg);
    const double spot = cfg.run.spots.front();
    std::vector<Sample> runs;
    for (int n : n_list) {
        Profile p = solve(s, n, cfg.run.method);
        lvb_price_result pr{};
        check(lvb_price(s.model.get(), s.contract.get(), p.get(), spot, &pr));
        runs.push_back({n, pr.discounted_price, std::move(p)});
    }
    const Sample& ref = runs.back();
    Report r = base_report("convergence", s, ref.profile.get(), ref.n);
    r.meta.emplace_back("spot", spot);
    r.meta.emplace_back("reference_n", static_cast<std::int64_t>(ref.n));

    double ref_scale = 0.0;
    {
        size_t nodes = 0;
        check(lvb_profile_size(ref.profile.get(), &nodes));
        for (lvb_side side : {LVB_SIDE_UPPER, LVB_SIDE_LOWER}) {
            int has = 0;
            check(lvb_profile_has(ref.profile.get(), side, &has));
            if (!has) continue;
            std::vector<double> v(nodes);
            check(lvb_profile_deltas(ref.profile.get(), side, v.data()));
            for (size_t i = 0; i + 1 < nodes; ++i) ref_scale = std::max(ref_scale, std::fabs(v[i]));
        }
    }
    // Below these levels differences are quadrature noise (premium integrals run at 1e-10 of their L1 norm).
    const double price_floor = 1e-8 * std::max(1.0, std::fabs(ref.price));
    const double profile_floor = 1e-9 * std::max(1.0, ref_scale);

    r.table.columns = {"n", "price", "price_error", "price_order", "profile_diff", "profile_order"};
    std::vector<double> pe, de;
    for (std::size_t k = 0; k + 1 < runs.size(); ++k) {
        pe.push_back(std::fabs(runs[k].price - ref.price));
        de.push_back(profile_gap(runs[k], ref));
    }
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (k + 1 == runs.size()) {
            r.table.rows.push_back({static_cast<std::int64_t>(runs[k].n), runs[k].price, Cell{}, Cell{}, Cell{}, Cell{}});
            continue;
        }
        Cell po = std::string("n/a"), dord = std::string("n/a");
        if (k > 0) {
            po = order(pe[k - 1], pe[k], runs[k - 1].n, runs[k].n, price_floor);
            dord = order(de[k - 1], de[k], runs[k - 1].n, runs[k].n, profile_floor);
        }
        r.table.rows.push_back({static_cast<std::int64_t>(runs[k].n), runs[k].price, pe[k], po, de[k], dord});
    }
    return r;
}

Report cmd_compare(const RunConfig& cfg) {
    require_spots(cfg);
    const Session s = open_session(cfg);
    const Profile p = solve(s, cfg.run.n, cfg.run.method);
    Report r = base_report("compare", s, p.get(), cfg.run.n);

    const auto& c = cfg.contract;
    const bool constant = (!c.lower || c.lower->type == "constant") && (!c.upper || c.upper->type == "constant");
    const bool vanilla = c.payoff.type != "smooth_bump" && !cfg.run.smoothing;
    const bool is_double = c.lower && c.upper;
    const bool closed = cfg.run.oracles.closed_form && cfg.model.type == "gbm" && constant && vanilla;
    const double tol = is_double ? 1e-2 : 5e-3;
    r.meta.emplace_back("closed_form_tolerance", closed ? Cell{tol} : Cell{});

    lvb_mc_config mc{};
    if (cfg.run.oracles.mc) {
        const McSpec& m = *cfg.run.oracles.mc;
        mc = {m.paths, m.steps, m.seed, m.bridge_correction ? 1 : 0};
        r.meta.emplace_back("mc_paths", static_cast<std::int64_t>(m.paths));
        r.meta.emplace_back("mc_steps", static_cast<std::int64_t>(m.steps));
        r.meta.emplace_back("mc_seed", static_cast<std::int64_t>(m.seed));
    }

    bool all_pass = true;
    r.table.columns = {"spot", "engine", "closed_form", "closed_form_rel_error", "closed_form_pass",
                       "mc", "mc_se", "mc_z", "mc_pass"};
    for (double spot : cfg.run.spots) {
        lvb_price_result pr{};
        check(lvb_price(s.model.get(), s.contract.get(), p.get(), spot, &pr));
        const double engine = pr.discounted_price;
        std::vector<Cell> row{spot, engine, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}};
        if (closed) {
            double cf = 0.0;
            if (is_double) check(lvb_closed_form_double(s.model.get(), s.contract.get(), spot, 200, 1e-12, &cf, nullptr, nullptr));
            else check(lvb_closed_form_single(s.model.get(), s.contract.get(), spot, &cf));
            const double err = std::fabs(engine - cf) / std::max(std::fabs(cf), 1e-12);
            row[2] = cf;
            row[3] = err;
            row[4] = err < tol;
            all_pass = all_pass && err < tol;
        }
        if (cfg.run.oracles.mc) {
            double est = 0.0, se = 0.0;
            check(lvb_mc_price(s.model.get(), s.contract.get(), spot, &mc, &est, &se));
            const double diff = std::fabs(engine - est);
            const bool pass = se > 0.0 ? diff <= 3.0 * se : diff <= 1e-12;
            row[5] = est;
            row[6] = se;
            row[7] = se > 0.0 ? Cell{diff / se} : Cell{};
            row[8] = pass;
            all_pass = all_pass && pass;
        }
        r.table.rows.push_back(std::move(row));
    }
    r.meta.emplace_back("all_pass", all_pass);
    return r;
}

Report cmd_validate(const RunConfig& cfg) {
    const Session s = open_session(cfg);
    Report r = base_report("validate", s, nullptr, 0);
    r.meta.emplace_back("valid", true);
    r.table.columns = {"valid", "regime", "warnings"};
    r.table.rows.push_back({true, std::string(regime_name(s.regime)), static_cast<std::int64_t>(s.warnings.size())});
    return r;
}

std::vector<int> parse_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad grid size '" + item + "' in --n-list");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barrier option pricing under local-volatility diffusions"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_path, format = "json", method, n_list_text;
    std::optional<int> n;
    std::optional<std::uint64_t> seed;
    std::vector<double> spots;
    bool pretty = false, canonical = false;

    app.add_option("--config", config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_path, "Write the report here instead of stdout");
    app.add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--n", n, "Time steps of the delta grid")->check(CLI::PositiveNumber);
    app.add_option("--method", method, "Delta solver")->check(CLI::IsMember({"volterra", "laplace", "auto"}));
    app.add_option("--seed", seed, "Monte Carlo seed");
    app.add_option("--spots", spots, "Spot list (overrides run.spots)")->delimiter(',');
    app.add_flag("--pretty", pretty, "Rounded, indented output");

    auto* price = app.add_subcommand("price", "Price at each spot");
    auto* ladder = app.add_subcommand("ladder", "Spot ladder of price, delta and gamma");
    auto* deltas = app.add_subcommand("deltas", "Export the barrier delta profile");
    auto* convergence = app.add_subcommand("convergence", "Grid refinement study");
    convergence->add_option("--n-list", n_list_text, "Ascending grid sizes, comma separated");
    auto* compare = app.add_subcommand("compare", "Engine against closed forms and Monte Carlo");
    auto* validate = app.add_subcommand("validate", "Check the configuration and contract");
    validate->add_flag("--canonical", canonical, "Print the canonical configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (n) cfg.run.n = *n;
        if (!method.empty()) cfg.run.method = method;
        if (seed && cfg.run.oracles.mc) cfg.run.oracles.mc->seed = *seed;
        if (!spots.empty()) cfg.run.spots = spots;

        std::ostringstream buf;
        if (validate->parsed() && canonical) {
            cmd_validate(cfg);
            buf << serialize_config(cfg);
        } else {
            Report r;
            if (price->parsed()) r = cmd_price(cfg);
            else if (ladder->parsed()) r = cmd_ladder(cfg);
            else if (deltas->parsed()) r = cmd_deltas(cfg);
            else if (convergence->parsed()) r = cmd_convergence(cfg, n_list_text.empty() ? std::vector<int>{} : parse_list(n_list_text));
            else if (compare->parsed()) r = cmd_compare(cfg);
            else r = cmd_validate(cfg);
            if (format == "csv") write_csv(buf, r, pretty);
            else write_json(buf, r, pretty);
        }

        if (out_path.empty()) {
            std::cout << buf.str();
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw ConfigError("cannot write " + out_path);
            out << buf.str();
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
