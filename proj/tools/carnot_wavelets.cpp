// Command-line harness: wires the library modules into reproducible
// experiments driven by JSON config files, emitting CSV/JSON reports and a
// run manifest.  Exit codes: 0 success, 1 config error, 2 contract violation.

#include <carnot/carnot.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using carnot::json;

namespace {

// ---------------------------------------------------------------------------
// run context: config, output directory, manifest bookkeeping
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

struct RunContext {
    json cfg;
    fs::path out;
    uint64_t seed = 1;
    int threads = 1;
    json manifest;
    std::chrono::steady_clock::time_point step_start;
    std::string step_name;

    void begin(const std::string& name) {
        step_name = name;
        step_start = std::chrono::steady_clock::now();
    }
    void end() {
        auto ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - step_start)
                      .count();
        manifest["timings_ms"][step_name] = ms;
    }
    void record_file(const fs::path& p) {
        manifest["files"].push_back(p.filename().string());
    }
    void write_manifest() {
        std::ofstream f(out / "run_manifest.json");
        f << manifest.dump(2) << "\n";
    }
};

RunContext make_context(const std::string& config_path, const std::string& out_dir,
                        std::optional<uint64_t> seed_override, int threads) {
    RunContext ctx;
    std::ifstream f(config_path);
    if (!f) throw carnot::ConfigError("cannot open config file: " + config_path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    try {
        ctx.cfg = json::parse(text);
    } catch (const json::exception& e) {
        throw carnot::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ctx.out = out_dir.empty() ? fs::path(ctx.cfg.value("out", "out")) : fs::path(out_dir);
    fs::create_directories(ctx.out);
    ctx.seed = seed_override ? *seed_override : ctx.cfg.value("seed", uint64_t(1));
    ctx.threads = threads;
    ctx.manifest["config_hash"] = fnv1a_hex(ctx.cfg.dump());
    ctx.manifest["version"] = "1.0.0";
    ctx.manifest["seed"] = ctx.seed;
    ctx.manifest["threads"] = threads;
    ctx.manifest["files"] = json::array();
    ctx.manifest["timings_ms"] = json::object();
    return ctx;
}

// ---------------------------------------------------------------------------
// shared config → object builders
// ---------------------------------------------------------------------------

carnot::GroupSpec group_from_config(const json& cfg) {
    if (cfg.contains("group_file")) {
        std::ifstream f(cfg["group_file"].get<std::string>());
        if (!f)
            throw carnot::ConfigError("cannot open group file: " +
                                      cfg["group_file"].get<std::string>());
        json gj;
        try {
            gj = json::parse(f);
        } catch (const json::exception& e) {
            throw carnot::ConfigError(std::string("group file is not valid JSON: ") +
                                      e.what());
        }
        return carnot::GroupSpec::from_json(gj);
    }
    if (cfg.contains("group"))
        return carnot::GroupSpec::from_json(cfg["group"]);
    throw carnot::ConfigError("config needs a \"group\" preset or \"group_file\"");
}

carnot::GridSpec grid_from_config(const json& cfg, const carnot::GroupSpec& G) {
    double R = cfg.value("half_width", 16.0);
    std::vector<int> pts;
    if (!cfg.contains("points"))
        throw carnot::ConfigError("config needs \"points\" (int or per-axis array)");
    if (cfg["points"].is_number_integer())
        pts.assign(G.n, cfg["points"].get<int>());
    else
        pts = cfg["points"].get<std::vector<int>>();
    return carnot::GridSpec(G, R, pts);
}

carnot::BumpSpec bump_from_config(const json& cfg, const char* key = "bump") {
    carnot::BumpSpec b;
    if (cfg.contains(key)) {
        b.flat_end = cfg[key].value("flat_end", b.flat_end);
        b.support_end = cfg[key].value("support_end", b.support_end);
    }
    return b;
}

std::pair<int, int> jrange_from_config(const json& cfg, int lo = -4, int hi = 4) {
    if (cfg.contains("j_range")) {
        auto v = cfg["j_range"].get<std::vector<int>>();
        if (v.size() != 2) throw carnot::ConfigError("j_range must be [jmin, jmax]");
        return {v[0], v[1]};
    }
    return {lo, hi};
}

std::vector<carnot::BesovParams> params_from_config(const json& cfg) {
    std::vector<carnot::BesovParams> out;
    if (cfg.contains("params")) {
        for (const auto& row : cfg["params"]) {
            auto v = row.get<std::vector<double>>();
            if (v.size() != 3)
                throw carnot::ConfigError("each params row must be [p, q, s]");
            out.push_back({v[0], v[1], v[2]});
        }
    }
    if (out.empty()) out.push_back({2.0, 2.0, 0.0});
    return out;
}

// Built-in test family: spectrally band-passed seeded noise, optionally
// augmented with dilated/translated copies of the Mexican-hat kernel.
std::vector<carnot::GridFunction> family_from_config(
    const json& cfg, const carnot::SubLaplacianMatrix& Lm, uint64_t seed) {
    json fam = cfg.value("family", json::object());
    int count = fam.value("count", 5);
    double lo = 1.0, hi = 1.0;
    if (fam.contains("plateau")) {
        lo = fam["plateau"][0].get<double>();
        hi = fam["plateau"][1].get<double>();
    }
    auto fns = carnot::band_passed_family(Lm, carnot::make_plateau(lo, hi),
                                          count, seed);
    int hats = fam.value("mexican_hats", 0);
    if (hats > 0) {
        carnot::SpectralKernel mh = carnot::make_mexican_hat(Lm, 1);
        std::mt19937_64 rng(seed + 101);
        std::uniform_real_distribution<double> tdist(0.8, 1.6);
        std::uniform_real_distribution<double> xdist(-0.5, 0.5);
        for (int i = 0; i < hats; ++i) {
            carnot::Point y(Lm.grid.group.n, 0.0);
            for (auto& c : y) c = xdist(rng);
            fns.push_back(carnot::translate_dilate(mh.kernel, tdist(rng), y));
        }
    }
    return fns;
}

void write_csv_text(RunContext& ctx, const std::string& name,
                    const std::string& header,
                    const std::vector<std::string>& rows) {
    fs::path p = ctx.out / name;
    std::ofstream f(p);
    f << header << "\n";
    for (const auto& r : rows) f << r << "\n";
    ctx.record_file(p);
}

std::string g17(double v) { return carnot::fmt_g17(v); }

// ---------------------------------------------------------------------------
// subcommand: group-info
// ---------------------------------------------------------------------------

int cmd_group_info(RunContext& ctx) {
    ctx.begin("group_info");
    carnot::GroupSpec G = group_from_config(ctx.cfg);
    json gj = G.to_json();

    // measured quasi-triangle constant: max |xy| / (|x| + |y|) over seeded
    // random pairs in a weighted unit box
    std::mt19937_64 rng(ctx.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 4096; ++trial) {
        carnot::Point x(G.n), y(G.n);
        for (int i = 0; i < G.n; ++i) {
            x[i] = u(rng);
            y[i] = u(rng);
        }
        double nx = G.quasi_norm(x), ny = G.quasi_norm(y);
        if (nx + ny == 0.0) continue;
        worst = std::max(worst, G.quasi_norm(G.product(x, y)) / (nx + ny));
    }
    ctx.end();

    std::printf("group: %s\n", gj.value("name", std::string("custom")).c_str());
    std::printf("n = %d\n", G.n);
    std::printf("weights =");
    for (int w : G.weights) std::printf(" %d", w);
    std::printf("\nQ = %d\n", G.Q);
    std::printf("horizontal layer dimension l = %d\n", G.l);
    std::printf("bracket table (i, j, k, c):\n");
    for (const auto& row : gj["brackets"])
        std::printf("  [%d, %d] -> %d : %s\n", row[0].get<int>(),
                    row[1].get<int>(), row[2].get<int>(),
                    g17(row[3].get<double>()).c_str());
    std::printf("quasi-triangle constant (measured, %d pairs): %s\n", 4096,
                g17(worst).c_str());

    json report = gj;
    report["Q"] = G.Q;
    report["l"] = G.l;
    report["quasi_triangle_constant"] = worst;
    fs::path p = ctx.out / "group_info.json";
    std::ofstream(p) << report.dump(2) << "\n";
    ctx.record_file(p);
    ctx.write_manifest();
    return 0;
}

// ---------------------------------------------------------------------------
// subcommand: wavelet
// ---------------------------------------------------------------------------

struct CheckRow {
    std::string name;
    double measured;
    double tolerance;
    bool skipped = false;
    bool pass() const { return skipped || measured <= tolerance; }
};

int cmd_wavelet(RunContext& ctx) {
    const json& cfg = ctx.cfg;
    carnot::GroupSpec G = group_from_config(cfg);
    carnot::GridSpec grid = grid_from_config(cfg, G);
    carnot::BumpSpec bump = bump_from_config(cfg);
    auto [jmin, jmax] = jrange_from_config(cfg);
    std::string backend = cfg.value("backend", "eig");
    bool skip_moments = cfg.value("skip_moments", false);
    json tols = cfg.value("tolerances", json::object());

    ctx.begin("assemble");
    carnot::SubLaplacianMatrix Lm = carnot::assemble_sublaplacian(grid);
    ctx.end();
    ctx.begin("build_wavelet");
    carnot::LPWavelet w = carnot::build_lp_wavelet(
        Lm, carnot::make_psi_hat(carnot::make_phi_hat(bump)), jmin, jmax, backend);
    ctx.end();

    // optional kernel cache (directory from CARNOT_CACHE)
    if (!carnot::cache_dir().empty()) {
        std::string base = ctx.manifest["config_hash"].get<std::string>();
        for (int j = jmin; j <= jmax; ++j)
            carnot::cache_store(base + "-psi" + std::to_string(j), w.psi_j(j));
        ctx.manifest["kernel_cache"] = carnot::cache_dir();
    }

    std::vector<CheckRow> checks;
    ctx.begin("checks");

    // profile-level partition of unity over the dyadic band sweep
    checks.push_back({"partition_of_unity",
                      carnot::check_partition_of_unity(w.psi_hat, 6,
                                                       std::pow(4.0, -6.0),
                                                       std::pow(4.0, 6.0)),
                      tols.value("partition", 1e-10)});

    // kernel-level orthogonality of scales two apart
    double ortho = 0.0;
    for (int j = jmin; j + 2 <= jmax; ++j)
        ortho = std::max(ortho, carnot::check_orthogonal_scales(w, j, j + 2));
    checks.push_back({"scale_orthogonality", ortho, tols.value("orthogonality", 1e-6)});

    // grid-level vanishing moments of the base kernel
    CheckRow moments{"vanishing_moments",
                     carnot::max_normalized_moment(w.moment_table),
                     tols.value("moments", 1e-2)};
    moments.skipped = skip_moments;
    checks.push_back(moments);

    // reproducing kernel: the plateau kernel must reproduce a field whose
    // spectrum sits on the flat part of the partition
    carnot::GridFunction probe =
        carnot::band_passed_family(Lm, carnot::make_plateau(1.0, 1.0), 1,
                                   ctx.seed, backend)
            .front();
    carnot::GridFunction reproduced =
        carnot::apply_multiplier(Lm, w.K.profile, probe, backend);
    checks.push_back({"reproducing_kernel",
                      carnot::rel_l2_dist(reproduced, probe),
                      tols.value("kernel", 1e-8)});

    // Calderon reconstruction of the same band-limited probe, taken at the
    // kernel level (grid convolutions) so that resolution limits show up
    int J = cfg.value("calderon_J", 4);
    carnot::GridFunction recon(grid);
    for (int j = std::max(-J, jmin); j <= std::min(J, jmax); ++j) {
        const carnot::GridFunction& psi = w.psi_j(j);
        recon += carnot::convolve(
            carnot::convolve(probe, carnot::involution(psi)), psi);
    }
    checks.push_back({"calderon_reconstruction",
                      carnot::rel_l2_dist(recon, probe),
                      tols.value("calderon", 1e-3)});
    ctx.end();

    std::vector<std::string> rows;
    for (const auto& c : checks) {
        std::string status = c.skipped ? "skipped" : (c.pass() ? "pass" : "fail");
        rows.push_back(c.name + "," + g17(c.measured) + "," + g17(c.tolerance) +
                       "," + status);
        std::printf("%-26s %-8s measured %s  tolerance %s\n", c.name.c_str(),
                    status.c_str(), g17(c.measured).c_str(),
                    g17(c.tolerance).c_str());
    }
    write_csv_text(ctx, "wavelet_checks.csv", "check,measured,tolerance,status",
                   rows);

    json manifest = carnot::wavelet_manifest(w, bump);
    manifest["skip_moments"] = skip_moments;
    json echo = json::object();
    for (const auto& c : checks) echo[c.name] = c.tolerance;
    manifest["effective_tolerances"] = echo;
    fs::path mp = ctx.out / "wavelet_manifest.json";
    std::ofstream(mp) << manifest.dump(2) << "\n";
    ctx.record_file(mp);
    ctx.write_manifest();

    for (const auto& c : checks)
        if (!c.pass()) {
            std::fprintf(stderr,
                         "check failed: %s measured %s exceeds tolerance %s\n",
                         c.name.c_str(), g17(c.measured).c_str(),
                         g17(c.tolerance).c_str());
            return 2;
        }
    return 0;
}

// ---------------------------------------------------------------------------
// subcommand: besov
// ---------------------------------------------------------------------------

int cmd_besov(RunContext& ctx) {
    const json& cfg = ctx.cfg;
    carnot::GroupSpec G = group_from_config(cfg);
    carnot::GridSpec grid = grid_from_config(cfg, G);
    auto [jmin, jmax] = jrange_from_config(cfg);
    std::string backend = cfg.value("backend", "eig");
    auto params_list = params_from_config(cfg);
    int J = cfg.value("J", 4);

    ctx.begin("assemble");
    carnot::SubLaplacianMatrix Lm = carnot::assemble_sublaplacian(grid);
    carnot::LPWavelet w = carnot::build_lp_wavelet(
        Lm, carnot::make_psi_hat(carnot::make_phi_hat(bump_from_config(cfg))),
        jmin, jmax, backend);
    ctx.end();

    for (const auto& prm : params_list)
        if (std::abs(prm.s) >= w.moments_order)
            throw carnot::MomentOrderTooLow(
                "smoothness s = " + g17(prm.s) + " needs |s| < " +
                std::to_string(w.moments_order) +
                " (verified vanishing-moment order of this wavelet)");

    ctx.begin("load_inputs");
    std::vector<carnot::GridFunction> fns;
    if (cfg.contains("input")) {
        carnot::GridFunction u = carnot::load_gfn(cfg["input"].get<std::string>());
        if (!(u.grid == grid))
            throw carnot::GridMismatch("input .gfn grid does not match config grid");
        fns.push_back(std::move(u));
    } else {
        fns = family_from_config(cfg, Lm, ctx.seed);
    }
    ctx.end();

    json cwt_cfg = cfg.value("cwt", json::object());
    bool do_cwt = cwt_cfg.value("enabled", true);
    std::vector<double> scales;
    if (do_cwt)
        scales = carnot::log_scale_grid(cwt_cfg.value("eps", 0.125),
                                        cwt_cfg.value("A", 8.0),
                                        cwt_cfg.value("n", 24));
    json heat_cfg = cfg.value("heat", json::object());
    bool do_heat = heat_cfg.value("enabled", false);
    int heat_k = heat_cfg.value("k", 1);

    ctx.begin("norms");
    std::vector<std::string> rows;
    for (size_t fi = 0; fi < fns.size(); ++fi) {
        double l2 = carnot::lp_norm(fns[fi], 2.0);
        if (l2 == 0.0) continue; // zero input contributes no rows
        for (const auto& prm : params_list) {
            double dyadic = carnot::besov_norm(fns[fi], w, prm, J).first;
            double cwt = 0.0, heat = 0.0;
            if (do_cwt)
                cwt = carnot::cwt_norm(fns[fi], Lm, w.psi_hat, w.moments_order,
                                       prm, scales, backend);
            if (do_heat)
                heat = carnot::heat_char_norm(fns[fi], Lm, heat_k, prm, scales,
                                              backend);
            rows.push_back(std::to_string(fi) + "," + g17(prm.p) + "," +
                           g17(prm.q) + "," + g17(prm.s) + "," + g17(dyadic) +
                           "," + g17(cwt) + "," + g17(heat) + "," + g17(l2));
        }
    }
    ctx.end();
    write_csv_text(ctx, "besov_norms.csv", "function,p,q,s,dyadic,cwt,heat,l2",
                   rows);
    std::printf("wrote %zu norm rows for %zu function(s)\n", rows.size(),
                fns.size());
    ctx.write_manifest();
    return 0;
}

// ---------------------------------------------------------------------------
// subcommand: frame
// ---------------------------------------------------------------------------

int cmd_frame(RunContext& ctx) {
    const json& cfg = ctx.cfg;
    carnot::GroupSpec G = group_from_config(cfg);
    carnot::GridSpec grid = grid_from_config(cfg, G);
    auto [jmin_w, jmax_w] = jrange_from_config(cfg);
    int jmin = -1, jmax = 1;
    if (cfg.contains("frame_bands")) {
        auto v = cfg["frame_bands"].get<std::vector<int>>();
        if (v.size() != 2)
            throw carnot::ConfigError("frame_bands must be [jmin, jmax]");
        jmin = v[0];
        jmax = v[1];
    }
    std::string backend = cfg.value("backend", "eig");
    double alpha = cfg.value("alpha", 0.5);
    auto prm = params_from_config(cfg).front();

    ctx.begin("assemble");
    carnot::SubLaplacianMatrix Lm = carnot::assemble_sublaplacian(grid);
    carnot::LPWavelet w = carnot::build_lp_wavelet(
        Lm, carnot::make_psi_hat(carnot::make_phi_hat(bump_from_config(cfg))),
        jmin_w, jmax_w, backend);
    std::vector<carnot::GridFunction> fns = family_from_config(cfg, Lm, ctx.seed);
    ctx.end();

    ctx.begin("density_precheck");
    carnot::SamplingSet S = carnot::make_lattice(G, alpha, grid);
    carnot::GridFunction Kn = w.K.kernel;
    double l1 = carnot::lp_norm(Kn, 1.0);
    if (l1 > 0.0) Kn *= carnot::cplx(1.0 / l1, 0.0);
    double radius = carnot::tile_diameter(S, ctx.seed + 11);
    double osc = carnot::osc_l1(Kn, radius);
    ctx.end();
    std::printf("alpha = %s  tile volume = %s  osc_l1 = %s\n", g17(alpha).c_str(),
                g17(S.tile_volume).c_str(), g17(osc).c_str());
    if (osc >= 1.0 && !cfg.value("skip_precheck", false))
        throw carnot::DensityPrecheckFailed(
            "kernel oscillation " + g17(osc) + " >= 1 at alpha = " + g17(alpha) +
            "; the sampling set is too sparse");

    ctx.begin("analysis");
    carnot::CoefficientArray c0 = carnot::analysis(fns.front(), w, S, jmin, jmax);
    ctx.end();
    {
        std::vector<std::string> rows;
        for (const auto& [key, val] : c0.entries)
            rows.push_back(std::to_string(key.first) + "," +
                           std::to_string(key.second) + "," + g17(val.real()) +
                           "," + g17(val.imag()));
        write_csv_text(ctx, "coefficients.csv", "j,gamma_index,re,im", rows);
        json side = {{"alpha", alpha},
                     {"tile", S.tile},
                     {"j_range", {jmin, jmax}},
                     {"dropped_samples", c0.dropped},
                     {"seq_norm", carnot::seq_norm(c0, prm)}};
        fs::path sp = ctx.out / "coefficients.json";
        std::ofstream(sp) << side.dump(2) << "\n";
        ctx.record_file(sp);
    }

    // frame-operator contraction factor rho over the test family
    ctx.begin("frame_operator");
    double rho = 0.0;
    for (const auto& f : fns) {
        double fn = carnot::lp_norm(f, 2.0);
        if (fn == 0.0) continue;
        carnot::GridFunction Sf = carnot::frame_operator(f, w, S, jmin, jmax);
        Sf *= carnot::cplx(S.tile_volume, 0.0);
        carnot::GridFunction r = f;
        r -= Sf;
        rho = std::max(rho, carnot::lp_norm(r, 2.0) / fn);
    }
    ctx.end();
    std::printf("measured rho = %s over %zu test functions\n", g17(rho).c_str(),
                fns.size());
    if (rho >= 1.0)
        throw carnot::NotContractive("frame operator is not contractive: rho = " +
                                     g17(rho) + " at alpha = " + g17(alpha));

    // Neumann inversion and atomic reconstruction of the first test function
    json ncfg = cfg.value("neumann", json::object());
    double tol = ncfg.value("tol", 5e-2);
    int max_iter = ncfg.value("max_iter", 12);
    ctx.begin("neumann");
    carnot::CoefficientArray dual =
        carnot::dual_coefficients(fns.front(), w, S, jmin, jmax, tol, max_iter);
    carnot::CoefficientArray scaled = dual;
    for (auto& [key, val] : scaled.entries)
        val *= std::pow(2.0, -key.first * double(G.Q));
    carnot::GridFunction rec = carnot::synthesis(scaled, w, S);
    double recon = carnot::rel_l2_dist(rec, fns.front());
    ctx.end();
    std::printf("atomic reconstruction residual = %s\n", g17(recon).c_str());

    carnot::FrameReport rep;
    rep.alpha = alpha;
    rep.tile_volume = S.tile_volume;
    rep.osc = osc;
    rep.rho = rho;
    rep.reconstruction_residual = recon;
    {
        carnot::NeumannResult nr =
            carnot::neumann_invert(fns.front(), w, S, jmin, jmax, tol, max_iter);
        rep.neumann_iters = nr.iterations;
    }
    rep.spread = carnot::discrete_equiv_report(fns, w, S, prm, jmin, jmax)
                     .norm_ratios.spread();
    fs::path rp = ctx.out / "frame_report.json";
    std::ofstream(rp) << rep.to_json().dump(2) << "\n";
    ctx.record_file(rp);

    // tightness-vs-density sweep over the configured alpha list
    if (cfg.contains("alpha_list")) {
        ctx.begin("tightness_sweep");
        auto alphas = cfg["alpha_list"].get<std::vector<double>>();
        auto table =
            carnot::tightness_vs_density(w, alphas, fns, grid, prm, jmin, jmax);
        std::vector<std::string> rows;
        for (const auto& r : table)
            rows.push_back(g17(r.alpha) + "," + g17(r.tile_volume) + "," +
                           g17(r.osc) + "," + g17(r.rho) + "," + g17(r.spread));
        ctx.end();
        write_csv_text(ctx, "frame_sweep.csv", "alpha,tile_volume,osc,rho,spread",
                       rows);
    }

    double recon_tol = cfg.value("tolerances", json::object())
                           .value("reconstruction", 5e-2);
    ctx.write_manifest();
    if (recon > recon_tol) {
        std::fprintf(stderr,
                     "check failed: atomic_reconstruction measured %s exceeds "
                     "tolerance %s\n",
                     g17(recon).c_str(), g17(recon_tol).c_str());
        return 2;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// subcommand: equiv
// ---------------------------------------------------------------------------

int cmd_equiv(RunContext& ctx) {
    const json& cfg = ctx.cfg;
    carnot::GroupSpec G = group_from_config(cfg);
    carnot::GridSpec grid = grid_from_config(cfg, G);
    auto [jmin, jmax] = jrange_from_config(cfg);
    std::string backend = cfg.value("backend", "eig");
    auto prm = params_from_config(cfg).front();
    std::vector<int> J_list = cfg.value("J_list", std::vector<int>{2, 3, 4});

    ctx.begin("assemble");
    carnot::SubLaplacianMatrix Lm = carnot::assemble_sublaplacian(grid);
    carnot::LPWavelet w1 = carnot::build_lp_wavelet(
        Lm, carnot::make_psi_hat(carnot::make_phi_hat(bump_from_config(cfg))),
        jmin, jmax, backend);
    carnot::LPWavelet w2 = carnot::build_lp_wavelet(
        Lm,
        carnot::make_psi_hat(carnot::make_phi_hat(bump_from_config(cfg, "bump2"))),
        jmin, jmax, backend);
    std::vector<carnot::GridFunction> fns = family_from_config(cfg, Lm, ctx.seed);
    ctx.end();

    std::vector<std::string> rows;
    auto emit = [&](const std::string& kind, int J, const carnot::RatioStats& st) {
        rows.push_back(kind + "," + std::to_string(J) + "," + g17(st.min) + "," +
                       g17(st.max) + "," + g17(st.spread()));
        std::printf("%-22s J=%d  spread = %s\n", kind.c_str(), J,
                    g17(st.spread()).c_str());
    };

    ctx.begin("reports");
    for (int J : J_list) {
        emit("identical_pair", J, carnot::norm_equiv_report(fns, w1, w1, prm, J));
        emit("wavelet_pair", J, carnot::norm_equiv_report(fns, w1, w2, prm, J));
    }

    // sub-Laplacian pair: rotate the horizontal frame when requested
    if (cfg.contains("rotation_angle")) {
        double th = cfg["rotation_angle"].get<double>();
        Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(G.l, G.l);
        rot(0, 0) = std::cos(th);
        rot(0, 1) = -std::sin(th);
        rot(1, 0) = std::sin(th);
        rot(1, 1) = std::cos(th);
        carnot::SubLaplacianMatrix Lr = carnot::assemble_sublaplacian(grid, rot);
        carnot::LPWavelet wr = carnot::build_lp_wavelet(
            Lr,
            carnot::make_psi_hat(carnot::make_phi_hat(bump_from_config(cfg))),
            jmin, jmax, backend);
        emit("rotated_operator_pair", J_list.back(),
             carnot::norm_equiv_report(fns, w1, wr, prm, J_list.back()));
    }

    // continuous-vs-dyadic comparison on the same wavelet profile
    {
        json cwt_cfg = cfg.value("cwt", json::object());
        auto scales = carnot::log_scale_grid(cwt_cfg.value("eps", 0.125),
                                             cwt_cfg.value("A", 8.0),
                                             cwt_cfg.value("n", 24));
        carnot::RatioStats st;
        for (const auto& f : fns) {
            double d = carnot::besov_norm(f, w1, prm, J_list.back()).first;
            double c = carnot::cwt_norm(f, Lm, w1.psi_hat, w1.moments_order, prm,
                                        scales, backend);
            if (d > 0.0) st.add(c / d);
        }
        emit("cwt_vs_dyadic", J_list.back(), st);
    }

    // smoothing-order shift under one application of the operator
    {
        int k = cfg.value("shift_k", 1);
        emit("laplacian_shift", J_list.back(),
             carnot::laplacian_shift_check(fns, Lm, w1, k, prm, J_list.back()));
    }
    ctx.end();

    write_csv_text(ctx, "equiv_report.csv", "kind,J,min,max,spread", rows);
    ctx.write_manifest();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelets and Besov norms on stratified Lie groups"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<uint64_t> seed;
    int threads = 1;

    std::map<std::string, int (*)(RunContext&)> handlers = {
        {"group-info", cmd_group_info},
        {"wavelet", cmd_wavelet},
        {"besov", cmd_besov},
        {"frame", cmd_frame},
        {"equiv", cmd_equiv},
    };
    std::map<std::string, std::string> help = {
        {"group-info", "print group structure and measured quasi-triangle constant"},
        {"wavelet", "build a wavelet system and run its validity checks"},
        {"besov", "compute dyadic, continuous, and heat-based norms"},
        {"frame", "sample coefficients, invert the frame operator, sweep density"},
        {"equiv", "norm-equivalence spreads across wavelet and operator pairs"},
    };
    for (auto& [name, fn] : handlers) {
        CLI::App* sub = app.add_subcommand(name, help[name]);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker thread count");
    }

    CLI11_PARSE(app, argc, argv);

    std::string chosen = app.get_subcommands().front()->get_name();
    try {
        RunContext ctx = make_context(config_path, out_dir, seed, threads);
        return handlers[chosen](ctx);
    } catch (const carnot::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const carnot::Error& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
