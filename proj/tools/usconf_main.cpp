#include "usconf/artifacts.hpp"
#include "usconf/compounding.hpp"
#include "usconf/confidence.hpp"
#include "usconf/denoise.hpp"
#include "usconf/eval.hpp"
#include "usconf/io.hpp"
#include "usconf/phantom.hpp"
#include "usconf/structural.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace usconf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitPredicates = 3;

ConfidenceConfig config_from(const std::string& path) {
    if (path.empty()) return ConfidenceConfig{};
    return load_config_file(path);
}

std::optional<ProbMask> load_masks(const std::string& needle_path, const std::string& reverb_path,
                                   const ImageGrid& image) {
    if (needle_path.empty() && reverb_path.empty()) return std::nullopt;
    ImageGrid needle = needle_path.empty()
                           ? ImageGrid(image.height(), image.width(), ValueDomain::probability)
                           : load_image_auto(needle_path).with_domain(ValueDomain::probability);
    ImageGrid reverb = reverb_path.empty()
                           ? ImageGrid(image.height(), image.width(), ValueDomain::probability)
                           : load_image_auto(reverb_path).with_domain(ValueDomain::probability);
    ProbMask mask = ProbMask::combined(std::move(needle), std::move(reverb));
    mask.validate_against(image);
    return mask;
}

double time_seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

int run(int argc, char** argv) {
    CLI::App app{"Ultrasound confidence maps via directed-graph propagation"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "plain-text key=value config file")->expected(1);

    // denoise
    auto* cmd_denoise = app.add_subcommand("denoise", "speckle-denoise an image");
    std::string dn_in, dn_out;
    cmd_denoise->add_option("in", dn_in)->required();
    cmd_denoise->add_option("out", dn_out)->required();

    // confidence
    auto* cmd_conf = app.add_subcommand("confidence", "intensity confidence map");
    std::string cf_in, cf_out, cf_needle, cf_reverb;
    bool cf_no_denoise = false;
    cmd_conf->add_option("in", cf_in)->required();
    cmd_conf->add_option("out", cf_out)->required();
    cmd_conf->add_option("--mask-needle", cf_needle, "needle probability image");
    cmd_conf->add_option("--mask-reverb", cf_reverb, "reverberation probability image");
    cmd_conf->add_flag("--no-denoise", cf_no_denoise, "skip the speckle denoise stage");

    // structural
    auto* cmd_struct = app.add_subcommand("structural", "structural confidence map");
    std::string st_in, st_ref, st_out, st_needle, st_reverb;
    bool st_no_denoise = false;
    cmd_struct->add_option("in", st_in)->required();
    cmd_struct->add_option("ref", st_ref)->required();
    cmd_struct->add_option("out", st_out)->required();
    cmd_struct->add_option("--mask-needle", st_needle, "needle probability image");
    cmd_struct->add_option("--mask-reverb", st_reverb, "reverberation probability image");
    cmd_struct->add_flag("--no-denoise", st_no_denoise, "skip the speckle denoise stage");

    // build-ref
    auto* cmd_ref = app.add_subcommand("build-ref", "reference map from an empty-phantom image");
    std::string br_in, br_out;
    bool br_no_denoise = false;
    cmd_ref->add_option("phantom", br_in)->required();
    cmd_ref->add_option("out", br_out)->required();
    cmd_ref->add_flag("--no-denoise", br_no_denoise, "skip the speckle denoise stage");

    // compound
    auto* cmd_comp = app.add_subcommand("compound", "confidence-weighted fusion of two views");
    std::string cp_img_a, cp_conf_a, cp_img_b, cp_conf_b, cp_out;
    cmd_comp->add_option("imgA", cp_img_a)->required();
    cmd_comp->add_option("confA", cp_conf_a)->required();
    cmd_comp->add_option("imgB", cp_img_b)->required();
    cmd_comp->add_option("confB", cp_conf_b)->required();
    cmd_comp->add_option("out", cp_out)->required();

    // phantom
    auto* cmd_phantom = app.add_subcommand("phantom", "render a synthetic test image");
    std::string ph_spec, ph_out, ph_masks, ph_patches;
    cmd_phantom->add_option("spec", ph_spec)->required();
    cmd_phantom->add_option("out-img", ph_out)->required();
    cmd_phantom->add_option("--out-masks", ph_masks, "prefix for <prefix>_needle.png / <prefix>_reverb.png");
    cmd_phantom->add_option("--out-patches", ph_patches, "patches CSV path");

    // eval
    auto* cmd_eval = app.add_subcommand("eval", "patch-median ordering checks");
    std::string ev_int, ev_str, ev_patches, ev_report;
    double ev_margin = 0.2, ev_closeness = 0.15;
    cmd_eval->add_option("intensity", ev_int)->required();
    cmd_eval->add_option("structural", ev_str)->required();
    cmd_eval->add_option("patches", ev_patches)->required();
    cmd_eval->add_option("report", ev_report)->required();
    cmd_eval->add_option("--margin", ev_margin, "required structural gap (default 0.2)");
    cmd_eval->add_option("--closeness", ev_closeness, "allowed |A-C| structural difference (default 0.15)");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "per-stage wall time on a synthetic image");
    int bench_size = 128;
    int bench_iters = 3;
    cmd_bench->add_option("size", bench_size)->required();
    cmd_bench->add_option("--iters", bench_iters, "repetitions, best time reported (default 3)");

    for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; }))
        sub->fallthrough(); // parent --config may follow the subcommand

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }
    const ConfidenceConfig cfg = config_from(config_path);

    if (*cmd_denoise) {
        const ImageGrid in = load_image_auto(dn_in);
        save_map_auto(denoise(in, cfg.denoise), dn_out);
        return kExitOk;
    }

    if (*cmd_conf) {
        ImageGrid img = load_image_auto(cf_in);
        const auto mask = load_masks(cf_needle, cf_reverb, img);
        if (!cf_no_denoise) img = denoise(img, cfg.denoise);
        ImageGrid conf = propagate(img, cfg, mask ? &*mask : nullptr);
        if (mask) conf = suppress_artifacts(conf, *mask);
        save_map_auto(conf, cf_out);
        return kExitOk;
    }

    if (*cmd_struct) {
        ImageGrid img = load_image_auto(st_in);
        const ReferenceMap ref = load_reference(st_ref);
        const auto mask = load_masks(st_needle, st_reverb, img);
        if (!st_no_denoise) img = denoise(img, cfg.denoise);
        const ImageGrid adjusted = propagate_truncated(img, ref, cfg, mask ? &*mask : nullptr);
        save_map_auto(structural_map(adjusted, ref), st_out);
        return kExitOk;
    }

    if (*cmd_ref) {
        ImageGrid img = load_image_auto(br_in);
        if (!br_no_denoise) img = denoise(img, cfg.denoise);
        save_reference(build_reference(img, cfg), br_out);
        return kExitOk;
    }

    if (*cmd_comp) {
        const ImageGrid img_a = load_grid_auto(cp_img_a, ValueDomain::intensity);
        const ImageGrid conf_a = load_grid_auto(cp_conf_a, ValueDomain::confidence);
        const ImageGrid img_b = load_grid_auto(cp_img_b, ValueDomain::intensity);
        const ImageGrid conf_b = load_grid_auto(cp_conf_b, ValueDomain::confidence);
        save_map_auto(fuse(img_a, conf_a, img_b, conf_b), cp_out);
        return kExitOk;
    }

    if (*cmd_phantom) {
        const GeneratedPhantom ph = generate(load_phantom_spec(ph_spec));
        save_map_auto(ph.image, ph_out);
        if (!ph_masks.empty()) {
            save_map(ph.mask.needle, ph_masks + "_needle.png", MapFormat::png16);
            save_map(ph.mask.reverb, ph_masks + "_reverb.png", MapFormat::png16);
        }
        if (!ph_patches.empty()) save_patches_csv(ph.patches, ph_patches);
        return kExitOk;
    }

    if (*cmd_eval) {
        const ImageGrid intensity = load_grid_auto(ev_int, ValueDomain::confidence);
        const ImageGrid structural = load_grid_auto(ev_str, ValueDomain::confidence);
        const auto patches = load_patches_csv(ev_patches);
        const OrderingReport report =
            check_orderings(intensity, structural, patches, ev_margin, ev_closeness);
        const std::string csv = report.to_csv();
        {
            std::FILE* f = std::fopen(ev_report.c_str(), "wb");
            if (!f) throw io_error("cannot write report '" + ev_report + "'");
            std::fwrite(csv.data(), 1, csv.size(), f);
            std::fclose(f);
        }
        std::cout << csv;
        return report.all_pass() ? kExitOk : kExitPredicates;
    }

    if (*cmd_bench) {
        if (bench_size < 8) throw std::invalid_argument("bench: size must be >= 8");
        PhantomSpec spec;
        spec.height = bench_size;
        spec.width = bench_size;
        spec.background = 0.5;
        spec.speckle_std = 0.2;
        spec.seed = 1;
        const ImageGrid img = generate(spec).image;

        double t_prop = HUGE_VAL, t_denoise = HUGE_VAL;
        ImageGrid denoised = img;
        for (int it = 0; it < std::max(1, bench_iters); ++it) {
            t_denoise = std::min(t_denoise, time_seconds([&] { denoised = denoise(img, cfg.denoise); }));
            t_prop = std::min(t_prop, time_seconds([&] { (void)propagate(img, cfg); }));
        }
        double t_full = t_denoise;
        t_full += time_seconds([&] { (void)propagate(denoised, cfg); });
        std::printf("stage                 size        seconds\n");
        std::printf("intensity(no-denoise) %dx%d    %.4f\n", bench_size, bench_size, t_prop);
        std::printf("denoise               %dx%d    %.4f\n", bench_size, bench_size, t_denoise);
        std::printf("intensity(full)       %dx%d    %.4f\n", bench_size, bench_size, t_full);
        return kExitOk;
    }

    return kExitUsage;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const usconf::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const CLI::Error&) {
        return kExitUsage; // CLI11_PARSE already printed the message
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
