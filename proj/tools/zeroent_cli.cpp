// Batch frontend: builds sources from JSON specs, runs the computations and
// writes CSV/JSON artifacts. Subcommands: wtd, block, weights, lambda,
// synthesize, checks.

#include "zeroent/asymptotics.hpp"
#include "zeroent/blocksys.hpp"
#include "zeroent/json_spec.hpp"
#include "zeroent/numeric.hpp"
#include "zeroent/source.hpp"
#include "zeroent/weights.hpp"
#include "zeroent/wtd.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
using namespace zeroent;

namespace {

namespace fs = std::filesystem;

// full binary64 round-trip precision, dot decimal separator
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct OutputContext {
    fs::path dir;
    std::uint64_t seed = 0;
    std::uint64_t spec_hash = 0;

    fs::path file(const std::string& name) const { return dir / name; }

    std::ofstream open_csv(const std::string& name, const std::string& header) const {
        fs::create_directories(dir);
        std::ofstream out(file(name), std::ios::binary);
        out << "# spec_hash=" << spec_hash << " seed=" << seed << "\n";
        out << header << "\n";
        return out;
    }

    void write_json(const std::string& name, json j) const {
        fs::create_directories(dir);
        j["spec_hash"] = spec_hash;
        j["seed"] = seed;
        std::ofstream out(file(name), std::ios::binary);
        out << j.dump(2) << "\n";
    }
};

std::uint64_t parse_count(const std::string& s) {
    return static_cast<std::uint64_t>(std::llround(std::stod(s)));
}

json law_json(const AsymptoticLaw& law) {
    return json{{"K", law.K},       {"beta", law.beta},  {"delta", law.delta},
                {"n_lo", law.n_lo}, {"n_hi", law.n_hi},  {"residual", law.residual}};
}

int cmd_wtd(const SourceSpec& spec, const OutputContext& out, std::uint64_t n_max,
            const std::string& fit_range, bool with_nu) {
    WtdOptions wopts;
    wopts.dense_limit = std::min<std::uint64_t>(std::max<std::uint64_t>(n_max, 1), 1u << 16);
    WtdSequence qtau = wtd_uniform(spec.source.a, n_max, wopts);
    WtdSequence qmu = wtd_pushforward(qtau, spec.measure.cdf);

    std::optional<WtdSequence> qnu;
    if (with_nu) {
        BlockSystem bs = make_block_system(spec.source, 1e-6, 100'000);
        DensityEstimate psi = invariant_density(bs, 256, 1e-9);
        qnu = wtd_pushforward(qtau, [psi](double x) { return psi.cdf(x); },
                              MeasureTag::block_invariant);
    }

    auto csv = out.open_csv("wtd.csv", "n,q_tau,q_mu,q_nu,r");
    auto emit = [&](std::uint64_t n) {
        csv << n << ',' << fmt17(qtau.at(n)) << ',' << fmt17(qmu.at(n)) << ','
            << (qnu ? fmt17(qnu->at(n)) : "") << ','
            << (n >= 1 && n < qtau.dense.size() ? fmt17(qtau.r(n)) : "") << "\n";
    };
    for (std::uint64_t n = 0; n < qtau.dense.size(); ++n) emit(n);
    for (const auto& [n, unused] : qtau.checkpoints) emit(n);

    json meta{{"n_max", n_max}, {"source", spec.raw}};
    if (!fit_range.empty()) {
        auto colon = fit_range.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("--fit expects LO:HI");
        AsymptoticLaw law = fit_law(qtau, parse_count(fit_range.substr(0, colon)),
                                    parse_count(fit_range.substr(colon + 1)));
        meta["law"] = law_json(law);
        out.write_json("wtd_law.json", law_json(law));
    }
    out.write_json("wtd_meta.json", meta);
    return 0;
}

int cmd_block(const SourceSpec& spec, const OutputContext& out, int grid, std::uint64_t m_max,
              double tol, int threads) {
    BlockSystem bs = make_block_system(spec.source, 1e-6, m_max);
    DensityOptions dopts;
    dopts.threads = threads;
    DensityEstimate psi = invariant_density(bs, grid, tol, dopts);

    auto csv = out.open_csv("density.csv", "node,value");
    for (std::size_t i = 0; i < psi.nodes.size(); ++i)
        csv << fmt17(psi.nodes[i]) << ',' << fmt17(psi.values[i]) << "\n";

    EntropyResult ent = block_entropy(bs, psi);
    std::uint64_t fit_hi = std::max<std::uint64_t>(bs.m_max, 65536);
    AsymptoticLaw law = fit_law(wtd_uniform(spec.source.a, fit_hi), 64, fit_hi);
    BlockTimeResult ew = expected_block_time(bs, psi, law);
    GoodClassDiagnostics diag = good_class_diagnostics(bs);

    json j{{"entropy", ent.value},
           {"entropy_tail_bound", ent.tail_bound},
           {"psi_at_zero", psi.at_zero()},
           {"m_max", bs.m_max},
           {"tail_mass", bs.tail_mass()},
           {"fixed_point_residual", density_fixed_point_residual(bs, psi)},
           {"wtd_law", law_json(law)},
           {"expected_block_time",
            json{{"class", ew.cls == BlockTimeClass::finite     ? "finite"
                           : ew.cls == BlockTimeClass::infinite ? "infinite"
                                                                : "indeterminate"},
                 {"partial_sum", ew.partial_sum},
                 {"value", ew.value},
                 {"tail_estimate", ew.tail_estimate}}},
           {"good_class",
            json{{"abscissa_estimate", diag.abscissa_estimate},
                 {"eta1", diag.eta1},
                 {"eta2", diag.eta2},
                 {"distortion", diag.distortion}}}};
    out.write_json("block.json", j);
    return 0;
}

int cmd_weights(const SourceSpec& spec, const OutputContext& out, bool exact, int depth,
                const std::vector<std::uint64_t>& depths, std::uint64_t samples, int threads) {
    WeightProfile prof;
    if (exact) {
        prof = exact_profile(spec.source, spec.measure, depth);
    } else {
        McOptions mo;
        mo.threads = threads;
        prof = mc_profile(spec.source, spec.measure, depths, samples, out.seed, mo);
    }
    auto csv = out.open_csv("profile.csv", "depth,m,stderr_m,nbar,stderr_nbar,samples");
    for (std::size_t i = 0; i < prof.depths.size(); ++i)
        csv << prof.depths[i] << ',' << fmt17(prof.m[i]) << ',' << fmt17(prof.stderr_m[i]) << ','
            << fmt17(prof.nbar[i]) << ',' << fmt17(prof.stderr_nbar[i]) << ','
            << (exact ? 0 : samples) << "\n";
    json meta{{"method", exact ? "exact" : "monte_carlo"}, {"source", spec.raw}};
    if (!exact) meta["samples"] = samples;
    out.write_json("profile_meta.json", meta);
    return 0;
}

int cmd_lambda(const SourceSpec& spec, const OutputContext& out, double v, double t, double s,
               int n_max) {
    double value = lambda_truncated(spec.source, spec.measure, v, t, s, n_max);
    json j{{"v", v}, {"t", t}, {"s", s}, {"n_max", n_max}, {"value", value}};
    if (t == 1.0 && s == 1.0) {
        double ref = (1.0 - std::pow(v, n_max + 1)) / (1.0 - v);
        j["geometric_reference"] = ref;
        j["identity_gap"] = std::abs(value - ref);
    }
    out.write_json("lambda.json", j);
    std::printf("lambda(%.17g, %.17g, %.17g) [n_max=%d] = %.17g\n", v, t, s, n_max, value);
    return 0;
}

int cmd_synthesize(const OutputContext& out, double beta, double delta, std::uint64_t n_max) {
    SynthesisResult res = synthesize_source(beta, delta, n_max);
    json spec_j = dril_spec_json(res.gamma, res.delta, res.source.c);
    OutputContext out2 = out;
    out2.spec_hash = fnv1a64(spec_j.dump());
    out2.write_json("synthesized_source.json", spec_j);
    out2.write_json("synthesis_report.json",
                    json{{"beta_m", beta},
                         {"delta_m", delta},
                         {"gamma", res.gamma},
                         {"delta", res.delta},
                         {"fitted_law", law_json(res.fitted)},
                         {"beta_q_target", res.beta_q_target},
                         {"delta_q_target", res.delta_q_target},
                         {"beta_error", res.beta_error},
                         {"delta_error", res.delta_error},
                         {"recovered_beta_m", res.recovered_beta_m},
                         {"recovered_delta_m", res.recovered_delta_m}});
    std::printf("synthesized DRIL(%g, %g); fitted beta=%.4f delta=%.4f (targets %.4f, %.4f)\n",
                res.gamma, res.delta, res.fitted.beta, res.fitted.delta, res.beta_q_target,
                res.delta_q_target);
    return 0;
}

int cmd_checks(const SourceSpec& spec, const OutputContext& out, std::uint64_t samples,
               int threads) {
    int failures = 0;
    auto record = [&](const std::string& name, bool pass, json detail) {
        detail["pass"] = pass;
        out.write_json("check_" + name + ".json", detail);
        std::printf("[%s] %s\n", pass ? "PASS" : "FAIL", name.c_str());
        if (!pass) ++failures;
    };

    // Lambda identity at (v, 1, 1)
    {
        bool pass = true;
        json pts = json::array();
        for (double v : {0.3, 0.7, 0.95}) {
            for (int nmax : {4, 8, 12}) {
                double val = lambda_truncated(spec.source, spec.measure, v, 1.0, 1.0, nmax);
                double ref = (1.0 - std::pow(v, nmax + 1)) / (1.0 - v);
                double gap = std::abs(val - ref);
                pass = pass && gap < 1e-12;
                pts.push_back(json{{"v", v}, {"n_max", nmax}, {"gap", gap}});
            }
        }
        record("lambda_identity", pass, json{{"points", pts}, {"tolerance", 1e-12}});
    }

    // Tauberian round trip on the synthetic beta = 1/2 law
    {
        AsymptoticLaw law;
        law.K = 1.0;
        law.beta = 0.5;
        law.delta = 0.0;
        double v = 1.0 - 1e-4;
        std::uint64_t n = 1'000'000;
        auto rep = abelian_tauberian_roundtrip(law, std::span<const double>(&v, 1),
                                               std::span<const std::uint64_t>(&n, 1));
        double dev_a = std::abs(rep.abelian[0].ratio - 1.0);
        double dev_t = std::abs(rep.tauberian[0].ratio - 1.0);
        bool pass = dev_a < 0.01 && dev_t < 0.01;
        auto csv = out.open_csv("check_tauberian.csv", "x,value,reference,deviation");
        for (const auto& p : rep.abelian)
            csv << fmt17(p.x) << ',' << fmt17(p.ratio) << ",1," << fmt17(p.ratio - 1.0) << "\n";
        for (const auto& p : rep.tauberian)
            csv << fmt17(p.x) << ',' << fmt17(p.ratio) << ",1," << fmt17(p.ratio - 1.0) << "\n";
        record("tauberian_sqrt", pass,
               json{{"abelian_ratio", rep.abelian[0].ratio},
                    {"tauberian_ratio", rep.tauberian[0].ratio}});
    }

    // v(q(n)) ~ 1/(gamma n)
    {
        WtdSequence q = wtd_uniform(spec.source.a, 1'000'000);
        AsymptoticLaw law = fit_law(q, 1'000, 1'000'000);
        double gamma = 1.0 / std::min(law.beta, 1.0);
        auto rep = check_v_asymptotic(spec.source, q, gamma, 1'000, 1'000'000);
        bool pass = rep.decreasing;
        record("v_asymptotic", pass,
               json{{"gamma", gamma},
                    {"max_deviation", rep.max_deviation},
                    {"deviation_at_n_hi", rep.deviation_at_n_hi},
                    {"decreasing", rep.decreasing}});
    }

    // renewal equation: signed gap D - product decreasing, last |dev| < 20%
    {
        BlockSystem bs = make_block_system(spec.source, 1e-6, 100'000);
        DensityEstimate psi = invariant_density(bs, 256, 1e-9);
        std::vector<double> vs{0.9, 0.99, 0.999};
        auto rep =
            renewal_check(spec.source, spec.measure, psi.at_zero(), vs, samples, out.seed, threads);
        bool gap_decreasing = true;
        for (std::size_t i = 1; i < rep.points.size(); ++i)
            if (rep.D - rep.points[i].product > rep.D - rep.points[i - 1].product)
                gap_decreasing = false;
        bool pass = gap_decreasing && rep.points.back().deviation < 0.20;
        json pts = json::array();
        auto csv = out.open_csv("check_renewal.csv", "v,value,reference,deviation");
        for (const auto& p : rep.points) {
            pts.push_back(json{{"v", p.v},
                               {"product", p.product},
                               {"deviation", p.deviation},
                               {"stderr", p.stderr_product}});
            csv << fmt17(p.v) << ',' << fmt17(p.product) << ',' << fmt17(rep.D) << ','
                << fmt17(p.deviation) << "\n";
        }
        record("renewal", pass, json{{"D", rep.D}, {"points", pts}});
    }

    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-entropy binary source laboratory"};
    app.require_subcommand(1);

    std::string source_file, out_dir = ".", fit_range, samples_str = "100000",
                nmax_str = "65536";
    std::uint64_t seed = 0;
    int threads = 0;

    auto add_common = [&](CLI::App* cmd, bool needs_source) {
        if (needs_source) cmd->add_option("--source", source_file, "source spec JSON")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--threads", threads, "worker threads (default: ZEROENT_THREADS or cores)");
    };

    auto* wtd = app.add_subcommand("wtd", "waiting-time distribution");
    add_common(wtd, true);
    wtd->add_option("--n-max", nmax_str, "largest n");
    wtd->add_option("--fit", fit_range, "law fit range LO:HI");
    bool with_nu = false;
    wtd->add_flag("--nu", with_nu, "also push forward to the block-invariant measure");

    auto* block = app.add_subcommand("block", "block system: density, entropy, diagnostics");
    add_common(block, true);
    int grid = 1024;
    std::string mmax_str = "100000";
    double tol = 1e-10;
    block->add_option("--grid", grid, "density grid size");
    block->add_option("--m-max", mmax_str, "branch truncation cap");
    block->add_option("--tol", tol, "power-iteration tolerance");

    auto* weights = app.add_subcommand("weights", "Shannon-weight profiles");
    add_common(weights, true);
    bool exact = false, mc = false;
    int depth = 16;
    std::string depths_str = "100,1000,10000";
    weights->add_flag("--exact", exact, "exact enumeration (depth <= 26)");
    weights->add_flag("--mc", mc, "Monte Carlo profile");
    weights->add_option("--depth", depth, "depth for --exact");
    weights->add_option("--depths", depths_str, "comma list of depths for --mc");
    weights->add_option("--samples", samples_str, "MC sample count");

    auto* lambda = app.add_subcommand("lambda", "truncated trivariate sum");
    add_common(lambda, true);
    double lv = 0.5, lt = 1.0, ls = 1.0;
    int lnmax = 12;
    lambda->add_option("--v", lv)->required();
    lambda->add_option("--t", lt);
    lambda->add_option("--s", ls);
    lambda->add_option("--n-max", lnmax);

    auto* synth = app.add_subcommand("synthesize", "source with prescribed Shannon weights");
    add_common(synth, false);
    double beta = 0.5, delta = 0.0;
    synth->add_option("--beta", beta, "beta_M")->required();
    synth->add_option("--delta", delta, "delta_M")->required();
    synth->add_option("--n-max", nmax_str, "wtd validation length");

    auto* checks = app.add_subcommand("checks", "renewal / tauberian / lambda / v-asymptotic");
    add_common(checks, true);
    checks->add_option("--samples", samples_str, "MC sample count");

    CLI11_PARSE(app, argc, argv);

    try {
        OutputContext out;
        out.dir = out_dir;
        out.seed = seed;

        SourceSpec spec;
        if (!source_file.empty()) {
            spec = load_source_spec(source_file);
            out.spec_hash = spec.hash;
        }

        if (wtd->parsed()) return cmd_wtd(spec, out, parse_count(nmax_str), fit_range, with_nu);
        if (block->parsed()) return cmd_block(spec, out, grid, parse_count(mmax_str), tol, threads);
        if (weights->parsed()) {
            if (exact == mc) throw std::invalid_argument("pick exactly one of --exact / --mc");
            std::vector<std::uint64_t> depths;
            std::stringstream ss(depths_str);
            std::string tok;
            while (std::getline(ss, tok, ',')) depths.push_back(parse_count(tok));
            return cmd_weights(spec, out, exact, depth, depths, parse_count(samples_str), threads);
        }
        if (lambda->parsed()) return cmd_lambda(spec, out, lv, lt, ls, lnmax);
        if (synth->parsed()) return cmd_synthesize(out, beta, delta, parse_count(nmax_str));
        if (checks->parsed()) return cmd_checks(spec, out, parse_count(samples_str), threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
