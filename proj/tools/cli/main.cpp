#include "nlpt/error.hpp"
#include "nlpt/fieldlab.hpp"
#include "nlpt/fixtures.hpp"
#include "nlpt/operators.hpp"
#include "nlpt/parallel.hpp"
#include "nlpt/slag.hpp"
#include "nlpt_io/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlpt::io::json;

namespace {

enum Exit : int { kPass = 0, kRefuted = 1, kInputError = 2, kInconclusive = 3 };

struct RunConfig {
    std::string command;
    std::string spec;
    std::vector<std::string> grids;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<double> etas{0.1, 0.5, 1.0};
    double tol = 0.0;
    unsigned threads = 0;
    std::size_t n = 0;
    std::string fixture;
    bool list = false;
};

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_metadata(const RunConfig& cfg, int exit_code)
{
    nlpt::io::write_json(fs::path(cfg.out) / "metadata.json", {{"command", cfg.command},
                                                               {"timestamp", utc_now()},
                                                               {"threads", nlpt::thread_count()},
                                                               {"exit_code", exit_code},
                                                               {"version", NLPT_VERSION}});
}

json config_json(const RunConfig& cfg)
{
    json doc{{"command", cfg.command}, {"seed", cfg.seed}, {"etas", cfg.etas}};
    if (cfg.samples) doc["samples"] = cfg.samples;
    if (cfg.tol > 0.0) doc["tol"] = cfg.tol;
    return doc;
}

std::string csv_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

const char* cell(const nlpt::ConditionResult& c) { return c.applicable ? nlpt::to_string(c.verdict) : "n/a"; }

nlpt::OperatorSpec load_spec(const RunConfig& cfg)
{
    auto op = nlpt::io::read_operator_spec(cfg.spec);
    if (cfg.tol > 0.0) op = nlpt::with_tolerance(std::move(op), cfg.tol);
    return op;
}

int certify_operator(const RunConfig& cfg)
{
    const auto op = load_spec(cfg);
    nlpt::SampleBox box;
    box.seed = cfg.seed;
    nlpt::PairOptions options;
    options.etas = cfg.etas;
    if (cfg.samples) options.rc_budget.pairs = cfg.samples;
    const auto cert = nlpt::certify_pair(op, op.domain, box, options);
    const auto corr = nlpt::correspondence_check(op, op.domain, box);

    json doc = config_json(cfg);
    doc["pair"] = nlpt::io::to_json(cert);
    doc["correspondence"] = nlpt::io::to_json(corr);
    nlpt::io::write_json(fs::path(cfg.out) / "certificate.json", doc);

    bool refuted = !corr.pass(), inconclusive = false;
    for (const auto& c : cert.conditions) {
        if (!c.applicable) continue;
        refuted = refuted || c.verdict == nlpt::Verdict::Refuted;
        inconclusive = inconclusive || c.verdict == nlpt::Verdict::Inconclusive;
        if (c.witness) nlpt::io::write_json(fs::path(cfg.out) / ("witness_" + c.name + ".json"), nlpt::io::to_json(*c.witness));
    }

    std::ofstream csv(fs::path(cfg.out) / "summary.csv");
    csv << "label,PEP,PB1,PB2,NDC,RC,correspondence\n" << op.label;
    for (const char* name : {"PEP", "PB1", "PB2", "NDC", "RC"}) csv << ',' << cell(*cert.find(name));
    csv << ',' << (corr.pass() ? "pass" : "fail") << '\n';
    if (cert.rc) {
        std::ofstream rc(fs::path(cfg.out) / "rc_table.csv");
        rc << "eta,delta,halvings,suspect\n";
        for (const auto& r : cert.rc->rows)
            rc << csv_number(r.eta) << ',' << (r.delta ? csv_number(*r.delta) : "") << ',' << r.halvings << ','
               << r.suspect << '\n';
    }
    for (const auto& c : cert.conditions)
        std::cout << c.name << ": " << cell(c) << '\n';
    std::cout << "correspondence: " << corr.mismatches << " mismatches over " << corr.samples << " samples\n";
    return refuted ? kRefuted : inconclusive ? kInconclusive : kPass;
}

int slag(const RunConfig& cfg)
{
    if (cfg.grids.size() != 1) throw nlpt::InputError("slag: exactly one --grid (the phase function h) is required");
    const auto h = nlpt::io::read_grid(cfg.grids.front());
    const std::size_t n = cfg.n ? cfg.n : h.dim();
    if (n != h.dim()) throw nlpt::InputError("slag: --n must equal the grid dimension");
    nlpt::SampleBox box;
    box.seed = cfg.seed;
    nlpt::SampleBudget validation{500, 20, 0};
    if (cfg.samples) validation.pairs = cfg.samples;
    const auto cert = nlpt::certify_slag_continuity(h, n, cfg.etas, box, validation);

    json doc = config_json(cfg);
    doc["phase_report"] = nlpt::io::to_json(cert);
    nlpt::io::write_json(fs::path(cfg.out) / "phase_report.json", doc);
    std::ofstream csv(fs::path(cfg.out) / "eta_delta.csv");
    csv << "eta,target,delta,validated,violations\n";
    for (const auto& r : cert.table)
        csv << csv_number(r.eta) << ',' << csv_number(r.target) << ',' << csv_number(r.delta) << ',' << r.validated
            << ',' << r.violations << '\n';
    if (!cert.witnesses.empty()) {
        const auto& w = cert.witnesses.front();
        nlpt::io::write_json(fs::path(cfg.out) / "witness.json", doc["phase_report"]["witness"]);
        std::cout << "refuted: h meets a special phase value; witness a=" << w.block.a << " b=" << w.block.b
                  << " gap=" << w.block.gap << '\n';
    } else {
        std::cout << nlpt::to_string(cert.continuity.verdict) << ": epsilon=" << cert.epsilon << '\n';
    }
    switch (cert.continuity.verdict) {
    case nlpt::Verdict::Certified: return kPass;
    case nlpt::Verdict::Refuted: return kRefuted;
    default: return kInconclusive;
    }
}

int compare(const RunConfig& cfg)
{
    if (cfg.grids.size() != 2) throw nlpt::InputError("compare: pass --grid twice (u, then v)");
    const auto op = load_spec(cfg);
    const auto u = nlpt::io::read_grid(cfg.grids[0]);
    const auto v = nlpt::io::read_grid(cfg.grids[1]);
    if (!(u.grid() == v.grid())) throw nlpt::InputError("compare: u and v must share one grid");
    if (u.dim() != op.n) throw nlpt::InputError("compare: grid dimension differs from the operator dimension");
    const auto verdict = nlpt::compare(u, v, nlpt::theta_from_pair(op));

    json doc = config_json(cfg);
    doc["map_label"] = "Theta[" + op.label + "]";
    doc["verdict"] = nlpt::io::to_json(verdict);
    nlpt::io::write_json(fs::path(cfg.out) / "verdict.json", doc);

    std::ofstream csv(fs::path(cfg.out) / "violations.csv");
    csv << "kind,input,node,x,value\n";
    auto coords = [](const std::vector<double>& x) {
        std::string s;
        for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + csv_number(x[i]);
        return s;
    };
    const char* inputs[] = {"u", "v"};
    for (std::size_t i = 0; i < verdict.preconditions.size(); ++i)
        for (const auto& f : verdict.preconditions[i].failures) {
            csv << "precondition," << inputs[i] << ',' << f.node << ',' << coords(f.x) << ',' << csv_number(f.value) << '\n';
            std::cerr << "precondition failed: " << inputs[i] << " at node " << f.node << " (" << coords(f.x) << ")\n";
        }
    for (const auto& f : verdict.violations)
        csv << "comparison,u-v," << f.node << ',' << coords(f.x) << ',' << csv_number(f.value) << '\n';
    if (verdict.theorem_contradiction)
        std::cerr << "THEOREM-CONTRADICTION: u > v inside with verified preconditions (max " << verdict.max_violation
                  << "); see verdict.json\n";
    std::cout << (verdict.pass ? "pass" : "fail") << (verdict.boundary_ok ? "" : " (boundary hypothesis unmet)") << '\n';
    return verdict.pass ? kPass : kRefuted;
}

int fixture(const RunConfig& cfg)
{
    if (cfg.list || cfg.fixture.empty()) {
        for (const auto& name : nlpt::fixture_names()) std::cout << name << '\n';
        std::cout << "affine_sphere_disc\n";
        return kPass;
    }
    const fs::path out(cfg.out);
    if (cfg.fixture == "affine_sphere_disc") {
        const auto ex = nlpt::affine_sphere_disc();
        nlpt::io::write_json(out / "spec.json", nlpt::io::operator_params_to_json(ex.op.kind, ex.op.label, ex.op.params));
        nlpt::io::write_grid(out / "u.json", ex.u + (-0.1));
        nlpt::io::write_grid(out / "v.json", ex.u);
        return kPass;
    }
    const auto params = nlpt::fixture_params(cfg.fixture);
    const auto kind = nlpt::fixture_kind(cfg.fixture);
    nlpt::io::write_json(out / "spec.json", nlpt::io::operator_params_to_json(kind, cfg.fixture, params));
    if (kind == "special_lagrangian") {
        const auto& h = params.fields.at("h");
        nlpt::io::write_grid(out / "h.json", nlpt::GridFunction(h.grid(), h.values()));
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"nlpt: certify structural hypotheses of nonlinear elliptic operators and run grid harnesses"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out, "Output directory (created if missing)");
        sub->add_option("--seed", cfg.seed, "Sampling seed");
        sub->add_option("--threads", cfg.threads, "Worker threads (default: available cores)");
    };
    auto add_sampling = [&](CLI::App* sub) {
        sub->add_option("--samples", cfg.samples, "Point pairs per continuity search");
        sub->add_option("--etas", cfg.etas, "Comma-separated eta grid")->delimiter(',');
    };

    auto* cert = app.add_subcommand("certify-operator", "Structural conditions, RC and correspondence for an operator spec");
    cert->add_option("--spec", cfg.spec, "Operator spec JSON")->required();
    cert->add_option("--tol", cfg.tol, "Membership boundary tolerance");
    add_common(cert);
    add_sampling(cert);

    auto* sl = app.add_subcommand("slag", "Phase analysis and continuity of the special Lagrangian map");
    sl->add_option("--grid", cfg.grids, "Grid file holding h")->required();
    sl->add_option("--n", cfg.n, "Matrix dimension N (default: grid dimension)");
    add_common(sl);
    add_sampling(sl);

    auto* cmp = app.add_subcommand("compare", "Comparison harness for a sub/super pair");
    cmp->add_option("--spec", cfg.spec, "Operator spec JSON")->required();
    cmp->add_option("--grid", cfg.grids, "u grid, then v grid")->required();
    cmp->add_option("--tol", cfg.tol, "Membership boundary tolerance");
    add_common(cmp);

    auto* fx = app.add_subcommand("fixture", "Write a built-in fixture as spec/grid files");
    fx->add_option("name", cfg.fixture, "Fixture name");
    fx->add_flag("--list", cfg.list, "List fixture names");
    add_common(fx);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kInputError;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.threads) nlpt::set_thread_count(cfg.threads);

    int code = kInputError;
    try {
        fs::create_directories(cfg.out);
        if (cfg.command == "certify-operator") code = certify_operator(cfg);
        else if (cfg.command == "slag") code = slag(cfg);
        else if (cfg.command == "compare") code = compare(cfg);
        else code = fixture(cfg);
    } catch (const nlpt::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        code = kInputError;
    } catch (const nlpt::InvalidParameter& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        code = kInputError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        code = kInputError;
    }
    if (cfg.command != "fixture" && code != kInputError) write_metadata(cfg, code);
    return code;
}
