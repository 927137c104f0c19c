#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "smscore/baseline.hpp"
#include "smscore/dataset.hpp"
#include "smscore/error.hpp"
#include "smscore/estimate.hpp"
#include "smscore/infer.hpp"
#include "smscore/loss.hpp"
#include "smscore/mc.hpp"
#include "smscore/report.hpp"

namespace smscore::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitArgs {
    std::string data;
    std::string loss = "logistic";
    std::optional<double> a;
    std::string domain = "ball";
    std::optional<double> radius;
    double tol = 1e-10;
    int max_iter = 200;
    int boot = 0;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::vector<double> contrast;
    std::string out;
};

struct SimArgs {
    std::vector<std::string> designs;
    std::vector<std::string> methods;
    std::vector<int> sizes;
    int reps = 0;
    int boot = 0;
    double level = 0.95;
    std::uint64_t seed = 0;
    std::optional<int> workers;
    std::string domain = "circle";
    std::optional<double> radius;
    std::string out;
    std::string json_out;
};

// Radius 100 for the ball, the unit circle otherwise.
FitOptions domain_options(const std::string& name, const std::optional<double>& radius) {
    FitOptions opts;
    try {
        opts.domain = parse_fit_domain(name);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    opts.radius = radius.value_or(opts.domain == FitDomain::Ball ? 100.0 : 1.0);
    if (!(opts.radius > 0.0)) throw UsageError("--radius must be positive");
    return opts;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

int resolve_workers(const std::optional<int>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("SMSCORE_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
        }
        throw UsageError("SMSCORE_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    }
    return 1;
}

// Output is staged in memory and only written once the command has succeeded.
void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cli", "cannot open " + path + " for writing");
    f << contents;
    if (!f) throw FormatError("cli", "write failed for " + path);
}

LossSpec loss_from(const std::string& name, const std::optional<double>& a) {
    LossKind kind;
    try {
        kind = parse_loss_kind(name);
    } catch (const ConfigError&) {
        throw UsageError("unknown loss '" + name + "'; supported losses: logistic, huber, probit, maxscore");
    }
    LossSpec spec{kind, a.value_or(default_scale(kind))};
    try {
        validate(spec);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return spec;
}

int cmd_fit(const FitArgs& args, std::ostream& out) {
    const bool maxscore = args.loss == "maxscore";
    std::optional<LossSpec> spec;
    if (!maxscore) spec = loss_from(args.loss, args.a);
    if (maxscore && args.boot > 0) throw UsageError("--boot is not available for --loss maxscore");
    if (args.boot != 0 && args.boot < 99) throw UsageError("--boot must be 0 or at least 99");
    if (!(args.level > 0.0 && args.level < 1.0)) throw UsageError("--level must lie in (0, 1)");
    FitOptions opts = domain_options(args.domain, args.radius);
    if (!(args.tol > 0.0)) throw UsageError("--tol must be positive");

    const Dataset data = load_csv(args.data);
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["command"] = "fit";
    j["data"] = {{"path", args.data}, {"n", data.n()}, {"d", data.d()}};
    std::ostringstream text;
    text << "data: " << args.data << " (n = " << data.n() << ", d = " << data.d() << ")\n";

    if (maxscore) {
        const MaxScoreFit ms = fit_maxscore_2d(data);
        j["loss"] = {{"kind", "maxscore"}};
        j["maxscore"] = to_json(ms);
        j["theta_hat"] = ms.theta_hat;
        j["estimate"] = ms.theta_hat;
        j["se"] = nullptr;
        j["ci_normal"] = nullptr;
        j["ci_boot"] = nullptr;
        j["note"] = "maximum score converges at rate n^(1/3) to a non-normal limit; no standard errors are reported";
        text << "method: conventional maximum score\n"
             << "theta_hat = " << format_double(ms.theta_hat) << "  score = " << format_double(ms.score)
             << "  argmax arc = [" << format_double(ms.argmax_interval.first) << ", "
             << format_double(ms.argmax_interval.second) << "]\n";
    } else {
        opts.grad_tol = args.tol;
        opts.max_iter = args.max_iter;
        const FitResult fr = fit(data, *spec, opts);
        j["loss"] = {{"kind", loss_name(spec->kind)}, {"a", spec->a}};
        j["fit"] = to_json(fr);
        j["b_hat"] = j["fit"]["b_hat"];
        j["theta_hat"] = j["fit"]["theta_hat"];
        text << "loss: " << loss_name(spec->kind) << " (a = " << spec->a << ")\n"
             << "b_hat =";
        for (double v : fr.b_hat) text << ' ' << format_double(v);
        text << "\niterations = " << fr.iterations << "  |grad| = " << fr.grad_norm << '\n';
        for (const auto& w : fr.warnings) text << "warning: " << w << '\n';

        std::optional<Target> target;
        if (!args.contrast.empty()) {
            if (static_cast<Eigen::Index>(args.contrast.size()) != data.d())
                throw UsageError("--contrast needs " + std::to_string(data.d()) + " comma-separated values");
            target = LinearTarget{Eigen::Map<const Eigen::VectorXd>(args.contrast.data(), data.d())};
        } else if (data.d() == 2) {
            target = AngleTarget{};
        }
        j["estimate"] = nullptr;
        j["se"] = nullptr;
        j["ci_normal"] = nullptr;
        j["ci_boot"] = nullptr;
        j["boot_rejections"] = nullptr;
        if (fr.on_boundary) {
            j["inference_note"] = "no inference at a boundary solution";
        } else {
            const SandwichEstimate sw = sandwich(data, *spec, fr.b_hat, opts.domain);
            j["sandwich"] = to_json(sw);
            json coef_se = json::array();
            for (Eigen::Index k = 0; k < data.d(); ++k) coef_se.push_back(std::sqrt(sw.V_hat(k, k) / sw.n));
            j["coef_se"] = coef_se;
            if (target) {
                j["target"] = std::holds_alternative<AngleTarget>(*target) ? json("angle") : json(args.contrast);
                const CiReport ci = ci_normal(fr, sw, *target, args.level);
                j["estimate"] = ci.estimate;
                j["se"] = ci.se;
                j["ci_normal"] = to_json(ci);
                text << (std::holds_alternative<AngleTarget>(*target) ? "theta" : "a'b") << " = "
                     << format_double(ci.estimate) << "  se = " << format_double(ci.se) << "  normal CI = ["
                     << format_double(ci.lo) << ", " << format_double(ci.hi) << "]\n";
                if (args.boot > 0) {
                    BootstrapOptions boot;
                    boot.draws = args.boot;
                    boot.level = args.level;
                    boot.seed = args.seed;
                    const BootstrapResult br = bootstrap_studentized(data, *spec, opts, *target, boot, fr, sw);
                    j["ci_boot"] = to_json(br.ci);
                    j["boot_rejections"] = *br.ci.boot_rejections;
                    text << "studentized bootstrap CI (S = " << args.boot << ") = [" << format_double(br.ci.lo)
                         << ", " << format_double(br.ci.hi) << "]  rejected resamples = "
                         << *br.ci.boot_rejections << '\n';
                }
            }
        }
    }

    const std::string payload = j.dump(2) + "\n";
    if (args.out.empty()) {
        out << payload;
    } else {
        write_file(args.out, payload);
        out << text.str();
    }
    return kExitOk;
}

McConfig config_from(const SimArgs& args) {
    McConfig config;
    if (!args.designs.empty()) {
        config.designs.clear();
        for (const auto& d : args.designs) {
            try {
                config.designs.push_back(parse_xdist(d));
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
        }
    }
    if (!args.methods.empty()) {
        config.methods.clear();
        for (const auto& m : args.methods) {
            try {
                config.methods.push_back(parse_method(m));
            } catch (const ConfigError& e) {
                throw UsageError(e.what());
            }
        }
    }
    if (!args.sizes.empty()) config.sample_sizes = args.sizes;
    config.reps = args.reps;
    config.boot_S = args.boot;
    config.level = args.level;
    config.master_seed = args.seed;
    config.workers = resolve_workers(args.workers);
    config.fit = domain_options(args.domain, args.radius);
    try {
        validate(config);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return config;
}

void emit_report(const SimArgs& args, const McReport& report, const std::string& command,
                 const std::string& text, std::ostream& out) {
    json j = to_json(report);
    j["command"] = command;
    const std::string payload = j.dump(2) + "\n";
    if (!args.out.empty()) write_file(args.out, payload);
    out << text;
}

void add_domain_flags(CLI::App* sub, std::string& domain, std::optional<double>& radius,
                      const std::string& fallback) {
    sub->add_option("--domain", domain, "ball | circle (default " + fallback + ")");
    sub->add_option("--radius", radius, "radius of the ball or circle (default 100 for ball, 1 for circle)");
}

void add_sim_flags(CLI::App* sub, SimArgs& args, bool boot) {
    sub->add_option("--reps", args.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "master seed");
    sub->add_option("--workers", args.workers, "worker threads (default: $SMSCORE_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", args.out, "write the JSON report here");
    add_domain_flags(sub, args.domain, args.radius, "circle");
    if (boot) {
        sub->add_option("--boot", args.boot, "bootstrap draws per replication (0 disables)");
        sub->add_option("--level", args.level, "confidence level");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Surrogate maximum score estimation for binary choice"};
    app.name("smscore");
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "fit a surrogate (or maximum score) model to a CSV file");
    fit_cmd->add_option("--data", fit_args.data, "CSV with header y,x1,...,xd")->required();
    fit_cmd->add_option("--loss", fit_args.loss, "logistic | huber | probit | maxscore");
    fit_cmd->add_option("--a", fit_args.a, "loss scale parameter (default 1, 2, 0.5)");
    add_domain_flags(fit_cmd, fit_args.domain, fit_args.radius, "ball");
    fit_cmd->add_option("--tol", fit_args.tol, "gradient tolerance");
    fit_cmd->add_option("--max-iter", fit_args.max_iter, "Newton iteration limit")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--boot", fit_args.boot, "studentized bootstrap draws (0 disables)");
    fit_cmd->add_option("--level", fit_args.level, "confidence level");
    fit_cmd->add_option("--seed", fit_args.seed, "bootstrap seed");
    fit_cmd->add_option("--contrast", fit_args.contrast, "inference on a'b for this a (default: angle when d = 2)")
        ->delimiter(',');
    fit_cmd->add_option("--out", fit_args.out, "write the JSON report here and print a summary");

    SimArgs sim_args;
    sim_args.reps = 2000;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo for chosen designs, methods and sample sizes");
    sim_cmd->add_option("--design", sim_args.designs, "normal | t5 | laplace (repeatable)");
    sim_cmd->add_option("--method", sim_args.methods, "maxscore | logistic | huber | probit (repeatable)");
    sim_cmd->add_option("--n", sim_args.sizes, "sample sizes (repeatable)");
    add_sim_flags(sim_cmd, sim_args, true);

    SimArgs t1_args;
    t1_args.reps = 10000;
    auto* t1_cmd = app.add_subcommand("table1", "RMSE at n = 250 and 1000 and their ratio");
    add_sim_flags(t1_cmd, t1_args, false);

    SimArgs t2_args;
    t2_args.reps = 10000;
    t2_args.boot = 399;
    auto* t2_cmd = app.add_subcommand("table2", "coverage of analytic and bootstrap confidence intervals");
    add_sim_flags(t2_cmd, t2_args, true);

    SimArgs fig_args;
    fig_args.reps = 10000;
    fig_args.sizes = {1000};
    auto* fig_cmd = app.add_subcommand("figures", "density and QQ arrays of theta_hat as CSV");
    fig_cmd->add_option("--n", fig_args.sizes, "sample size");
    fig_cmd->add_option("--reps", fig_args.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    fig_cmd->add_option("--seed", fig_args.seed, "master seed");
    fig_cmd->add_option("--workers", fig_args.workers, "worker threads")->check(CLI::PositiveNumber);
    fig_cmd->add_option("--out", fig_args.out, "CSV output path (default stdout)");
    add_domain_flags(fig_cmd, fig_args.domain, fig_args.radius, "circle");
    fig_cmd->add_option("--json", fig_args.json_out, "also write the JSON report here");

    std::vector<const char*> argv{"smscore"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_args, out);

        if (sim_cmd->parsed()) {
            if (sim_args.sizes.empty()) sim_args.sizes = {250, 1000};
            const McConfig config = config_from(sim_args);
            McReport report = run_coverage(config);
            add_distribution(report);
            std::string text = format_table1(report);
            if (!report.coverage_analytic.empty()) text += '\n' + format_table2(report);
            emit_report(sim_args, report, "simulate", text, out);
            return kExitOk;
        }
        if (t1_cmd->parsed()) {
            const McConfig config = config_from(t1_args);
            const McReport report = run_rmse(config);
            emit_report(t1_args, report, "table1", format_table1(report), out);
            return kExitOk;
        }
        if (t2_cmd->parsed()) {
            t2_args.methods = {"logistic", "huber", "probit"};
            const McConfig config = config_from(t2_args);
            const McReport report = run_coverage(config);
            emit_report(t2_args, report, "table2", format_table2(report), out);
            return kExitOk;
        }
        if (fig_cmd->parsed()) {
            fig_args.methods = {"logistic", "huber", "probit"};
            const McConfig config = config_from(fig_args);
            const McReport report = run_distribution(config);
            std::ostringstream csv;
            write_figures_csv(report, csv);
            std::string payload;
            if (!fig_args.json_out.empty()) {
                json j = to_json(report);
                j["command"] = "figures";
                payload = j.dump(2) + "\n";
            }
            if (fig_args.out.empty()) {
                out << csv.str();
            } else {
                write_file(fig_args.out, csv.str());
            }
            if (!payload.empty()) write_file(fig_args.json_out, payload);
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "usage error: [" << e.module() << "] " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: module=" << e.module() << " kind=" << e.kind() << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: module=cli kind=internal: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace smscore::cli
