// Command-line driver: phantom | forward | reconstruct | verify.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 accuracy failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "mrt/config.hpp"
#include "mrt/io.hpp"
#include "mrt/reconstruct.hpp"
#include "mrt/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::uint64_t tensor_hash(const mrt::SymmetricTensorField& f) {
    std::uint64_t h = 1469598103934665603ull;
    for (const mrt::Field& c : f.comp) {
        std::uint64_t hc = mrt::fnv1a64(c.data(), c.size() * sizeof(double));
        h ^= hc;
        h *= 1099511628211ull;
    }
    return h;
}

int cmd_phantom(const mrt::RunConfig& c) {
    c.validate();
    fs::create_directories(c.outdir);
    mrt::DiscGrid grid = mrt::make_disc_grid(c.grid_n);
    auto kind = mrt::phantom_kind_from_string(c.phantom_kind);
    mrt::SymmetricTensorField f = mrt::make_phantom_tensor(grid, c.m, kind, c.phantom_bumps);
    mrt::save_tensor_field(c.outdir + "/phantom", f, c.grid_n,
                           "phantom kind=" + c.phantom_kind + " m=" + std::to_string(c.m));
    if (c.atten_kind != "none") {
        mrt::AttenuationMap a =
            mrt::make_attenuation(grid, mrt::phantom_kind_from_string(c.atten_kind), c.atten_bump);
        mrt::save_scalar_field(c.outdir + "/attenuation", a.a, c.grid_n,
                               "attenuation kind=" + c.atten_kind);
    }
    std::cout << "wrote " << c.outdir << "/phantom and companions\n";
    return 0;
}

int cmd_forward(const mrt::RunConfig& c, bool csv) {
    c.validate();
    int gn = 0;
    mrt::SymmetricTensorField f = mrt::load_tensor_field(c.outdir + "/phantom", &gn);
    if (f.m != c.m) throw mrt::DataError("phantom order does not match config m");
    if (gn != c.grid_n) throw mrt::DataError("phantom grid does not match config grid_n");
    mrt::DiscGrid grid = mrt::make_disc_grid(gn);
    mrt::AttenuationMap a = mrt::zero_attenuation(grid);
    if (fs::exists(c.outdir + "/attenuation.hdr")) {
        int an = 0;
        a.a = mrt::load_scalar_field(c.outdir + "/attenuation", &an);
        if (an != gn) throw mrt::DataError("attenuation grid does not match phantom grid");
    }
    mrt::BoundaryGrid bg = mrt::make_boundary_grid(c.n_beta);
    mrt::MomentaSinogram s =
        mrt::ray_transform(f, a, grid, bg, c.n_theta, c.quad_step(grid.h));
    mrt::save_sinogram(c.outdir + "/sinogram", s, tensor_hash(f));
    if (csv) mrt::export_sinogram_csv(c.outdir + "/sinogram.csv", s);
    std::cout << "wrote " << c.outdir << "/sinogram (m=" << s.m << ", " << s.n_beta << "x"
              << s.n_theta << ")\n";
    return 0;
}

int cmd_reconstruct(const mrt::RunConfig& c, bool csv, bool pgm, const std::string& truth_path) {
    c.validate();
    mrt::MomentaSinogram s = mrt::load_sinogram(c.outdir + "/sinogram");
    if (s.m != c.m) throw mrt::DataError("sinogram order does not match config m");
    mrt::DiscGrid grid = mrt::make_disc_grid(c.grid_n);

    mrt::AttenuationMap a = mrt::zero_attenuation(grid);
    const mrt::AttenuationMap* ap = nullptr;
    if (s.attenuated) {
        if (!fs::exists(c.outdir + "/attenuation.hdr"))
            throw mrt::DataError("sinogram is attenuated but no attenuation field is present");
        int an = 0;
        a.a = mrt::load_scalar_field(c.outdir + "/attenuation", &an);
        if (an != c.grid_n) throw mrt::DataError("attenuation grid does not match grid_n");
        ap = &a;
    }

    mrt::SymmetricTensorField truth;
    const mrt::SymmetricTensorField* tp = nullptr;
    std::string tpath = truth_path.empty() ? c.outdir + "/phantom" : truth_path;
    if (fs::exists(tpath + ".hdr")) {
        int tn = 0;
        truth = mrt::load_tensor_field(tpath, &tn);
        if (tn == c.grid_n && truth.m == c.m) tp = &truth;
    }

    mrt::PipelineConfig pc;
    pc.N = c.N;
    pc.standoff = c.standoff();
    pc.error_radius = c.error_radius;
    pc.fac_n_theta = c.fac_n_theta;
    pc.neg_mode_tol = c.neg_mode_tol;
    pc.boundary_oversample = c.boundary_oversample;
    mrt::ReconstructionReport rep = mrt::reconstruct(s, ap, c.m, grid, pc, tp);

    mrt::save_tensor_field(c.outdir + "/recon", rep.tensor, c.grid_n, "reconstruction");
    {
        std::ofstream r(c.outdir + "/report.txt");
        r.precision(12);
        r << "format: mrt-report-v1\n";
        r << "m: " << c.m << "\ngrid_n: " << c.grid_n << "\nn_beta: " << s.n_beta
          << "\nn_theta: " << s.n_theta << "\nN: " << c.N << "\n";
        r << "attenuated: " << (s.attenuated ? 1 : 0) << "\n";
        r << "rel_l2_error: " << rep.rel_l2_error << "\n";
        r << "error_radius: " << rep.error_radius << "\n";
        r << "stability_ratio: " << rep.stability_ratio << "\n";
        r << "stability_anomaly: " << (rep.stability_anomaly ? 1 : 0) << "\n";
        r << "off_parity_residual: " << rep.off_parity_residual << "\n";
        r << "f0_imag_residual: " << rep.f0_imag_residual << "\n";
        r << "standoff_extrapolated: " << rep.standoff_extrapolated << "\n";
        if (s.attenuated) {
            r << "l11_alpha: " << rep.l11_alpha << "\n";
            r << "l11_beta: " << rep.l11_beta << "\n";
            r << "neg_mode_residual: " << rep.neg_mode_residual << "\n";
        }
        for (std::size_t k = 0; k < rep.level_sup.size(); ++k)
            r << "level_" << k << "_sup: " << rep.level_sup[k] << "\n"
              << "level_" << k << "_tail: " << rep.level_tail[k] << "\n";
        r << "seconds_total: " << rep.seconds_total << "\n";
    }
    if (csv) {
        std::ofstream lv(c.outdir + "/recon_levels.csv");
        lv << "level,sup_norm,tail_ratio\n";
        lv.precision(17);
        for (std::size_t k = 0; k < rep.level_sup.size(); ++k)
            lv << k << ',' << rep.level_sup[k] << ',' << rep.level_tail[k] << '\n';
        // axis slice per component, plot-friendly
        std::ofstream pr(c.outdir + "/recon_slice.csv");
        pr << "x";
        for (int k = 0; k <= c.m; ++k) pr << ",comp" << k;
        if (tp)
            for (int k = 0; k <= c.m; ++k) pr << ",truth" << k;
        pr << '\n';
        pr.precision(17);
        int iy = c.grid_n / 2;
        for (int ix = 0; ix < c.grid_n; ++ix) {
            pr << grid.x(ix);
            for (int k = 0; k <= c.m; ++k) pr << ',' << rep.tensor.comp[k][grid.idx(ix, iy)];
            if (tp)
                for (int k = 0; k <= c.m; ++k) pr << ',' << truth.comp[k][grid.idx(ix, iy)];
            pr << '\n';
        }
    }
    if (pgm)
        for (int k = 0; k <= c.m; ++k)
            mrt::export_pgm(c.outdir + "/recon_comp" + std::to_string(k) + ".pgm",
                            rep.tensor.comp[k], c.grid_n);
    std::cout << "wrote " << c.outdir << "/recon, report.txt";
    if (rep.rel_l2_error >= 0.0) std::cout << "  (rel L2 error " << rep.rel_l2_error << ")";
    std::cout << "\n";
    return 0;
}

int cmd_verify(const mrt::RunConfig& c) {
    auto results = mrt::run_verify_suite(c.grid_n);
    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] %-42s metric=%.3e tol=%.1e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.metric, r.tol);
        all = all && r.pass;
    }
    return all ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"momenta ray transform simulation and A-analytic reconstruction on the disc"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    // pre-scan for --config so file values become flag defaults
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    mrt::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = mrt::load_config(config_path);
    } catch (const mrt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (const char* env = std::getenv("MRT_OUTDIR")) cfg.outdir = env;

    app.add_option("--config", config_path, "config file (key = value lines)");
    app.add_option("--m", cfg.m, "tensor order");
    app.add_option("--grid-n", cfg.grid_n, "grid nodes per axis");
    app.add_option("--n-beta", cfg.n_beta, "boundary nodes");
    app.add_option("--n-theta", cfg.n_theta, "direction samples");
    app.add_option("--modes", cfg.N, "mode truncation N");
    app.add_option("--quad-step-factor", cfg.quad_step_factor, "chord step / grid spacing");
    app.add_option("--standoff-factor", cfg.standoff_factor, "B standoff in boundary spacings");
    app.add_option("--boundary-oversample", cfg.boundary_oversample,
                   "trig upsampling of boundary data in the sweep");
    app.add_option("--error-radius", cfg.error_radius, "error metric radius");
    app.add_option("--fac-n-theta", cfg.fac_n_theta, "integrating factor angular samples");
    app.add_option("--neg-mode-tol", cfg.neg_mode_tol, "negative-mode residual tolerance");
    app.add_option("--phantom-kind", cfg.phantom_kind, "zero | polynomial-bump | gaussian-bump");
    app.add_option("--atten-kind", cfg.atten_kind, "none | polynomial-bump | gaussian-bump");
    app.add_option("--atten-scale", cfg.atten_bump.scale, "attenuation amplitude");
    app.add_option("--atten-radius", cfg.atten_bump.radius, "attenuation bump radius");
    app.add_option("--outdir", cfg.outdir, "output directory");

    bool csv = false, pgm = false;
    std::string truth_path;
    CLI::App* sc_phantom = app.add_subcommand("phantom", "write phantom tensor + attenuation");
    CLI::App* sc_forward = app.add_subcommand("forward", "simulate the momenta sinogram");
    sc_forward->add_flag("--csv", csv, "also export sinogram.csv");
    CLI::App* sc_rec = app.add_subcommand("reconstruct", "invert a sinogram");
    sc_rec->add_flag("--csv", csv, "export per-level and slice CSVs");
    sc_rec->add_flag("--pgm", pgm, "export component PGM images");
    sc_rec->add_option("--truth", truth_path, "ground-truth tensor file base");
    CLI::App* sc_verify = app.add_subcommand("verify", "run the operator identity suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc_phantom->parsed()) return cmd_phantom(cfg);
        if (sc_forward->parsed()) return cmd_forward(cfg, csv);
        if (sc_rec->parsed()) return cmd_reconstruct(cfg, csv, pgm, truth_path);
        if (sc_verify->parsed()) return cmd_verify(cfg);
    } catch (const mrt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mrt::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const mrt::AccuracyError& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
