// Command-line front end: `segment` runs the ADMM models on an image,
// `synth` renders the built-in test scenes, `check` validates convexity of a
// level-set dump or mask.  Exit codes: 0 success, 1 runtime failure (or a
// nonconvex `check` verdict), 2 configuration/input errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "cvxseg/admm.hpp"
#include "cvxseg/convexity.hpp"
#include "cvxseg/errors.hpp"
#include "cvxseg/forces.hpp"
#include "cvxseg/io.hpp"
#include "cvxseg/sdf.hpp"
#include "cvxseg/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

struct SegmentArgs {
    std::string image_path;
    std::string model = "gmmc";
    std::string out_dir = ".";
    std::vector<double> init_circle;  // cx, cy, r (1-based center)
    std::vector<double> init_rect;    // x0, y0, x1, y1 (1-based, inclusive)
    std::string init_mask_path;
    std::string landmarks_path;
    std::string scribbles_path;
    std::string truth_path;
    cvxseg::AdmmConfig admm;
    cvxseg::ForceConfig force;
};

struct SynthArgs {
    std::string shape;
    int width = 128;
    int height = 128;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

struct CheckArgs {
    std::string phi_path;
    std::string mask_path;
    double tol = 1.0;
    std::vector<double> levels = {-3.0, 0.0, 3.0, 7.0};
};

/// Option wiring lives in a constructor so the app can be rebuilt with fresh
/// defaults when a parameter file has to be expanded into flags.
struct Front {
    SegmentArgs seg;
    SynthArgs syn;
    CheckArgs chk;
    std::string config_path;
    CLI::App app{"Two-phase segmentation with a convex shape prior"};
    CLI::App* seg_cmd = nullptr;
    CLI::App* syn_cmd = nullptr;
    CLI::App* chk_cmd = nullptr;

    Front() {
        app.require_subcommand(1);

        seg_cmd = app.add_subcommand("segment", "Segment an image");
        seg_cmd->add_option("--config", config_path,
                            "Parameter file with one 'key = value' line per flag "
                            "(keys are the long option names); command-line flags "
                            "override the file");
        seg_cmd->add_option("--image", seg.image_path, "Input image (PGM P5 or PPM P6)")
            ->required();
        seg_cmd->add_option("--model", seg.model,
                            "Model: gmm, gmmc, gmml, gmmlc, rp or rpc")
            ->capture_default_str();
        seg_cmd->add_option("--out", seg.out_dir, "Output directory")
            ->capture_default_str();
        seg_cmd->add_option("--init-circle", seg.init_circle,
                            "Initial contour as circle cx,cy,r (1-based center)")
            ->delimiter(',');
        seg_cmd->add_option("--init-rect", seg.init_rect,
                            "Initial contour as rectangle x0,y0,x1,y1 (1-based, inclusive)")
            ->delimiter(',');
        seg_cmd->add_option("--init-mask", seg.init_mask_path,
                            "Initial contour as a mask PGM (object = black)");
        seg_cmd->add_option("--landmarks", seg.landmarks_path,
                            "Landmark file, one 1-based 'm n' pair per line (gmml/gmmlc)");
        seg_cmd->add_option(
            "--scribbles", seg.scribbles_path,
            "Scribble PGM: 255 object, 128 background, 0 unlabeled (rp/rpc)");
        seg_cmd->add_option("--truth", seg.truth_path,
                            "Ground-truth mask; adds a dice column to diagnostics.csv");
        seg_cmd->add_option("--rho0", seg.admm.rho0, "Fidelity weight rho0")
            ->capture_default_str();
        seg_cmd->add_option("--rho1", seg.admm.rho1, "Laplacian penalty weight rho1")
            ->capture_default_str();
        seg_cmd->add_option("--iters", seg.admm.num_iters, "Outer iteration count")
            ->capture_default_str();
        seg_cmd->add_option("--inner-steps", seg.admm.inner_steps,
                            "Force-linearization steps per outer iteration")
            ->capture_default_str();
        seg_cmd->add_option("--theta", seg.admm.theta, "Landmark penalty weight")
            ->capture_default_str();
        seg_cmd
            ->add_option("--early-stop-residual", seg.admm.early_stop_residual,
                         "Residual threshold for early stopping")
            ->capture_default_str();
        seg_cmd
            ->add_option("--early-stop-stable", seg.admm.early_stop_stable,
                         "Iterations the mask must stay unchanged before stopping")
            ->capture_default_str();
        seg_cmd->add_option("--w0", seg.force.w0, "Background force weight")
            ->capture_default_str();
        seg_cmd->add_option("--w1", seg.force.w1, "Object force weight")
            ->capture_default_str();
        seg_cmd->add_option("--alpha", seg.force.alpha, "Edge detector contrast weight")
            ->capture_default_str();
        seg_cmd->add_option("--beta", seg.force.beta, "Edge detector gradient weight")
            ->capture_default_str();
        seg_cmd->add_option("--eps", seg.force.eps, "Heaviside/delta regularization width")
            ->capture_default_str();
        seg_cmd->add_option("--a1", seg.force.a1, "Region prior spatial falloff")
            ->capture_default_str();
        seg_cmd->add_option("--a2", seg.force.a2, "Region prior intensity falloff")
            ->capture_default_str();
        seg_cmd->add_option("--eps-p", seg.force.eps_p, "Region prior denominator floor")
            ->capture_default_str();
        seg_cmd->add_option("--lambda", seg.force.lambda, "Covariance diagonal loading")
            ->capture_default_str();

        syn_cmd = app.add_subcommand("synth", "Render a synthetic test scene");
        syn_cmd->add_option("--shape", syn.shape,
                            "disk, ellipse, crescent, occluded-disk or low-contrast-disk")
            ->required();
        syn_cmd->add_option("--width", syn.width, "Image width")->capture_default_str();
        syn_cmd->add_option("--height", syn.height, "Image height")->capture_default_str();
        syn_cmd->add_option("--sigma", syn.sigma, "Gaussian noise standard deviation")
            ->capture_default_str();
        syn_cmd->add_option("--seed", syn.seed, "Noise seed")->capture_default_str();
        syn_cmd->add_option("--out", syn.out_dir, "Output directory")
            ->capture_default_str();

        chk_cmd = app.add_subcommand("check", "Convexity report for a level set or mask");
        chk_cmd->add_option("--phi", chk.phi_path, "Level-set dump (phi.f64)");
        chk_cmd->add_option("--mask", chk.mask_path, "Mask PGM (object = black)");
        chk_cmd->add_option("--tol", chk.tol, "Convexity tolerance in pixels")
            ->capture_default_str();
        chk_cmd->add_option("--levels", chk.levels, "Sublevels to test")
            ->delimiter(',')
            ->capture_default_str();
    }
};

std::vector<std::pair<std::string, std::string>> read_config_pairs(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cvxseg::ParseError(path + ": cannot open file");
    std::vector<std::pair<std::string, std::string>> pairs;
    const auto trim = [](const std::string& s) {
        const char* ws = " \t\r";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    };
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
        const std::string value = eq == std::string::npos ? "" : trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw cvxseg::ParseError(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        if (key == "config")
            throw cvxseg::ParseError(path + ":" + std::to_string(line_no) +
                                     ": nested parameter files are not supported");
        pairs.emplace_back(key, value);
    }
    return pairs;
}

/// Expands `key = value` lines into --key value tokens ahead of the user's
/// own flags, then reparses into a fresh option set.  Keys the command line
/// already provides are dropped, so flags override the file; any flag that
/// picks an initial contour suppresses every init key in the file.
std::unique_ptr<Front> reparse_with_config(const Front& prev, int argc, char** argv) {
    const auto pairs = read_config_pairs(prev.config_path);
    for (const auto& [key, value] : pairs)
        if (prev.seg_cmd->get_option_no_throw("--" + key) == nullptr)
            throw cvxseg::ConfigError(prev.config_path + ": unknown key '" + key + "'");

    int sub = 1;
    while (sub < argc && std::string(argv[sub]) != "segment") ++sub;
    std::vector<std::string> user(argv + std::min(sub + 1, argc), argv + argc);

    const auto user_has = [&user](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(user.begin(), user.end(), [&flag](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    const bool user_init =
        user_has("init-circle") || user_has("init-rect") || user_has("init-mask");

    std::vector<std::string> tokens{"segment"};
    for (const auto& [key, value] : pairs) {
        if (user_has(key)) continue;
        if (user_init && key.rfind("init-", 0) == 0) continue;
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    for (std::size_t i = 0; i < user.size(); ++i) {
        if (user[i] == "--config") { ++i; continue; }
        if (user[i].rfind("--config=", 0) == 0) continue;
        tokens.push_back(user[i]);
    }

    auto fresh = std::make_unique<Front>();
    std::reverse(tokens.begin(), tokens.end());
    fresh->app.parse(std::move(tokens));
    return fresh;
}

cvxseg::BinaryMask circle_mask(int width, int height, double cx, double cy, double r) {
    cvxseg::BinaryMask mask(width, height);
    const double cm = cx - 1.0, cn = cy - 1.0;  // user coordinates are 1-based
    for (int n = 0; n < height; ++n)
        for (int m = 0; m < width; ++m)
            if (std::hypot(m - cm, n - cn) <= r)
                mask.values[static_cast<std::size_t>(n) * width + m] = 0;
    return mask;
}

cvxseg::BinaryMask rect_mask(int width, int height, double x0, double y0, double x1,
                             double y1) {
    cvxseg::BinaryMask mask(width, height);
    for (int n = 0; n < height; ++n)
        for (int m = 0; m < width; ++m)
            if (m >= x0 - 1.0 && m <= x1 - 1.0 && n >= y0 - 1.0 && n <= y1 - 1.0)
                mask.values[static_cast<std::size_t>(n) * width + m] = 0;
    return mask;
}

cvxseg::BinaryMask build_init_mask(const SegmentArgs& args, int width, int height) {
    const int given = (args.init_circle.empty() ? 0 : 1) +
                      (args.init_rect.empty() ? 0 : 1) +
                      (args.init_mask_path.empty() ? 0 : 1);
    if (given != 1)
        throw cvxseg::ConfigError(
            "exactly one of --init-circle, --init-rect, --init-mask is required");

    cvxseg::BinaryMask mask(width, height);
    if (!args.init_circle.empty()) {
        if (args.init_circle.size() != 3)
            throw cvxseg::ConfigError("--init-circle expects cx,cy,r");
        mask = circle_mask(width, height, args.init_circle[0], args.init_circle[1],
                           args.init_circle[2]);
    } else if (!args.init_rect.empty()) {
        if (args.init_rect.size() != 4)
            throw cvxseg::ConfigError("--init-rect expects x0,y0,x1,y1");
        mask = rect_mask(width, height, args.init_rect[0], args.init_rect[1],
                         args.init_rect[2], args.init_rect[3]);
    } else {
        mask = cvxseg::read_mask(args.init_mask_path);
        if (mask.width != width || mask.height != height)
            throw cvxseg::ConfigError(args.init_mask_path +
                                      ": initial mask size does not match the image");
    }
    if (mask.object_count() == 0)
        throw cvxseg::ConfigError("initial mask has no object pixels inside the image");
    if (static_cast<long long>(mask.object_count()) ==
        static_cast<long long>(width) * height)
        throw cvxseg::ConfigError("initial mask covers the whole image");
    return mask;
}

void require_inside(const std::vector<cvxseg::PixelCoord>& coords, int width, int height,
                    const std::string& what) {
    for (const cvxseg::PixelCoord& p : coords)
        if (p.m < 0 || p.m >= width || p.n < 0 || p.n >= height)
            throw cvxseg::ConfigError(what + ": pixel " + std::to_string(p.m + 1) + " " +
                                      std::to_string(p.n + 1) + " lies outside the image");
}

int run_segment(const SegmentArgs& args) {
    const auto model = cvxseg::model_from_string(args.model);
    if (!model)
        throw cvxseg::ConfigError("unknown model '" + args.model +
                                  "' (expected gmm, gmmc, gmml, gmmlc, rp or rpc)");

    cvxseg::AdmmConfig cfg = args.admm;
    cfg.model = *model;
    cfg.validate();
    args.force.validate();

    const cvxseg::Image image = cvxseg::read_image(args.image_path);
    const cvxseg::BinaryMask init = build_init_mask(args, image.width(), image.height());

    cvxseg::LabelSet labels;
    if (!args.landmarks_path.empty()) {
        cvxseg::read_landmarks(args.landmarks_path, labels);
        require_inside(labels.landmarks, image.width(), image.height(),
                       args.landmarks_path);
    }
    if (!args.scribbles_path.empty()) {
        const cvxseg::Image probe = cvxseg::read_image(args.scribbles_path);
        if (probe.width() != image.width() || probe.height() != image.height())
            throw cvxseg::ConfigError(args.scribbles_path +
                                      ": scribble image size does not match the image");
        cvxseg::read_scribbles(args.scribbles_path, labels);
    }

    std::optional<cvxseg::BinaryMask> truth;
    if (!args.truth_path.empty()) {
        truth = cvxseg::read_mask(args.truth_path);
        if (truth->width != image.width() || truth->height != image.height())
            throw cvxseg::ConfigError(args.truth_path +
                                      ": truth mask size does not match the image");
    }

    const cvxseg::SegmentationResult result = cvxseg::run_segmentation(
        image, init, labels, cfg, args.force, truth ? &*truth : nullptr);

    cvxseg::ConvexityReport report;
    cvxseg::PixelCoord worst{};
    report.max_violation = cvxseg::laplacian_violation(
        result.phi, cvxseg::Region::interior(image.width(), image.height()), &worst);
    report.worst_pixel = worst;
    try {
        report.mask_convex = cvxseg::is_mask_convex(result.mask);
    } catch (const cvxseg::EmptyObjectError&) {
        report.mask_convex = false;
    }

    namespace fs = std::filesystem;
    const fs::path out(args.out_dir);
    fs::create_directories(out);
    cvxseg::write_mask((out / "mask.pgm").string(), result.mask);
    cvxseg::write_image((out / "overlay.ppm").string(),
                        cvxseg::render_overlay(image, result.mask));
    cvxseg::write_phi((out / "phi.f64").string(), result.phi);
    cvxseg::write_diagnostics_csv((out / "diagnostics.csv").string(), result.history);
    {
        const std::string path = (out / "report.txt").string();
        std::ofstream file(path);
        if (!file) throw cvxseg::ParseError(path + ": cannot open file for writing");
        file << cvxseg::format_report(report);
    }

    std::cout << "model: " << cvxseg::to_string(cfg.model) << "\n";
    std::cout << "iterations: " << result.iterations
              << (result.early_stopped ? " (early stop)" : "") << "\n";
    if (!result.history.empty()) {
        const cvxseg::IterationStats& last = result.history.back();
        std::cout << "final energy: " << last.energy << "\n";
        std::cout << "final convexity violation: " << last.convexity_violation << "\n";
        if (last.dice) std::cout << "final dice: " << *last.dice << "\n";
    }
    std::cout << "object pixels: " << result.mask.object_count() << "\n";
    std::cout << "mask convex: " << (report.mask_convex ? "yes" : "no") << "\n";
    std::cout << "outputs: " << fs::absolute(out).string() << "\n";
    return kExitOk;
}

int run_synth(const SynthArgs& args) {
    const auto shape = cvxseg::synth_shape_from_string(args.shape);
    if (!shape)
        throw cvxseg::ConfigError(
            "unknown shape '" + args.shape +
            "' (expected disk, ellipse, crescent, occluded-disk or low-contrast-disk)");

    const cvxseg::SynthScene scene =
        cvxseg::synth_scene(*shape, args.width, args.height, args.sigma, args.seed);

    namespace fs = std::filesystem;
    const fs::path out(args.out_dir);
    fs::create_directories(out);
    cvxseg::write_image((out / "image.pgm").string(), scene.image);
    cvxseg::write_mask((out / "truth.pgm").string(), scene.truth);
    std::cout << "wrote " << (out / "image.pgm").string() << " and "
              << (out / "truth.pgm").string() << "\n";
    return kExitOk;
}

int run_check(const CheckArgs& args) {
    const int given = (args.phi_path.empty() ? 0 : 1) + (args.mask_path.empty() ? 0 : 1);
    if (given != 1)
        throw cvxseg::ConfigError("exactly one of --phi, --mask is required");

    cvxseg::SdfField phi(1, 1);
    if (!args.phi_path.empty()) {
        phi = cvxseg::read_phi(args.phi_path);
    } else {
        phi = cvxseg::sdf_from_mask(cvxseg::read_mask(args.mask_path));
    }

    const cvxseg::ConvexityReport report =
        cvxseg::sublevel_convexity_oracle(phi, args.levels, args.tol);
    std::cout << cvxseg::format_report(report);
    return report.all_convex() ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    auto front = std::make_unique<Front>();
    try {
        front->app.parse(argc, argv);
        if (front->seg_cmd->parsed() && !front->config_path.empty())
            front = reparse_with_config(*front, argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return front->app.exit(e);
    } catch (const CLI::ParseError& e) {
        front->app.exit(e);
        return kExitConfig;
    } catch (const cvxseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (front->seg_cmd->parsed()) return run_segment(front->seg);
        if (front->syn_cmd->parsed()) return run_synth(front->syn);
        return run_check(front->chk);
    } catch (const cvxseg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cvxseg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cvxseg::EmptyLabelsError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
