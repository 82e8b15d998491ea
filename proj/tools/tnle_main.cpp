#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tnle/error.hpp"
#include "tnle/io.hpp"
#include "tnle/model.hpp"
#include "tnle/pipeline.hpp"
#include "tnle/spectral.hpp"
#include "tnle/stats.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
    std::size_t window = 7;
    std::size_t n_eigs = 8;
    bool weak_texture = false;
    double delta = 0.99;
};

tnle::EstimationParams make_params(const CommonOpts& c) {
    tnle::EstimationParams p;
    p.window = c.window;
    p.n_eigs = c.n_eigs;
    if (c.weak_texture) {
        p.selection.policy = tnle::SelectionPolicy::WeakTexture;
        p.selection.delta = c.delta;
    }
    return p;
}

std::vector<tnle::Tensor3> load_images(const tnle::Manifest& mf, std::vector<std::string>* ids) {
    if (mf.entries.empty()) throw tnle::IoError("manifest is empty");
    std::vector<tnle::Tensor3> images;
    images.reserve(mf.entries.size());
    for (const auto& path : mf.entries) {
        images.push_back(tnle::decode_image(path));
        if (ids) ids->push_back(std::filesystem::path(path).filename().string());
    }
    return images;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Color-image noise level estimation from covariance eigen-spectra"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "Train a coefficient bank on a manifest of images");
    std::string train_manifest, train_out;
    std::vector<double> train_sigmas;
    CommonOpts train_common;
    tnle::GdConfig gd;
    std::uint64_t train_seed = 1;
    bool pooled = false;
    train->add_option("--manifest", train_manifest, "Manifest of clean training images")->required();
    train->add_option("--sigmas", train_sigmas, "Comma-separated noise levels")
        ->required()
        ->delimiter(',');
    train->add_option("--out", train_out, "Output bank file")->required();
    train->add_option("--window", train_common.window, "Sliding window size");
    train->add_option("--n-eigs", train_common.n_eigs, "Number of smallest eigenvalues");
    train->add_option("--alpha", gd.alpha, "Gradient-descent step size");
    train->add_option("--epsilon", gd.epsilon, "Gradient-descent termination distance");
    train->add_option("--seed", train_seed, "Base noise seed");
    train->add_flag("--pooled", pooled, "Also fit one pooled coefficient set");
    train->add_flag("--weak-texture", train_common.weak_texture, "Enable weak-texture patch selection");
    train->add_option("--delta", train_common.delta, "Weak-texture confidence level");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Estimate the noise level of one image");
    std::string est_image, est_bank, est_mode = "nearest";
    bool est_json = false;
    CommonOpts est_common;
    estimate->add_option("image", est_image, "Input image")->required();
    estimate->add_option("--bank", est_bank, "Coefficient bank file")->required();
    estimate->add_option("--mode", est_mode, "Coefficient selection: nearest|pooled")
        ->check(CLI::IsMember({"nearest", "pooled"}));
    estimate->add_flag("--json", est_json, "Print the full report as JSON");
    estimate->add_flag("--weak-texture", est_common.weak_texture, "Enable weak-texture patch selection");
    estimate->add_option("--delta", est_common.delta, "Weak-texture confidence level");

    // inject-noise
    auto* inject = app.add_subcommand("inject-noise", "Add seeded Gaussian noise to an image");
    std::string inj_image, inj_out;
    double inj_sigma = 0.0;
    std::uint64_t inj_seed = 1;
    inject->add_option("image", inj_image, "Input image")->required();
    inject->add_option("--sigma", inj_sigma, "Noise standard deviation")->required();
    inject->add_option("--seed", inj_seed, "Noise seed");
    inject->add_option("--out", inj_out, "Output PPM file")->required();

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "Dump the covariance eigen-spectrum as CSV");
    std::string spec_image, spec_out;
    CommonOpts spec_common;
    spectrum->add_option("image", spec_image, "Input image")->required();
    spectrum->add_option("--window", spec_common.window, "Sliding window size");
    spectrum->add_option("--out", spec_out, "Output CSV file")->required();

    // benchmark
    auto* bench = app.add_subcommand("benchmark", "Run both estimators over a manifest");
    std::string bench_manifest, bench_bank, bench_out, bench_metrics;
    std::vector<double> bench_sigmas;
    std::uint64_t bench_seed = 1;
    CommonOpts bench_common;
    bench->add_option("--manifest", bench_manifest, "Manifest of clean evaluation images")->required();
    bench->add_option("--sigmas", bench_sigmas, "Comma-separated noise levels")
        ->required()
        ->delimiter(',');
    bench->add_option("--bank", bench_bank, "Coefficient bank file")->required();
    bench->add_option("--seed", bench_seed, "Base noise seed")->required();
    bench->add_option("--out", bench_out, "Results CSV")->required();
    bench->add_option("--metrics", bench_metrics, "Optional metrics CSV");
    bench->add_flag("--weak-texture", bench_common.weak_texture, "Enable weak-texture patch selection");
    bench->add_option("--delta", bench_common.delta, "Weak-texture confidence level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (train->parsed()) {
            std::vector<std::string> ids;
            const auto images = load_images(tnle::read_manifest(train_manifest), &ids);
            const auto bank = tnle::train_bank(images, train_sigmas, make_params(train_common),
                                               gd, train_seed, pooled);
            for (const auto& w : bank.warnings) std::cerr << "warning: " << w << "\n";
            tnle::write_bank(bank, train_out);
            std::cout << "trained " << bank.entries.size() << " level(s) -> " << train_out << "\n";
        } else if (estimate->parsed()) {
            const auto bank = tnle::read_bank(est_bank);
            auto params = make_params(est_common);
            params.window = bank.window;
            params.n_eigs = bank.n_eigs;
            params.mode = est_mode == "pooled" ? tnle::BankMode::Pooled : tnle::BankMode::Nearest;
            const auto img = tnle::decode_image(est_image);
            const auto rep = tnle::estimate_noise(img, bank, params);
            for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
            if (est_json) {
                nlohmann::json j{{"schema", "tnle-report-1"},
                                 {"sigma_hat", rep.sigma_hat},
                                 {"sigma_hat_sq", rep.sigma_hat_sq},
                                 {"lambdas", rep.lambdas},
                                 {"pilot", rep.pilot},
                                 {"selected_ref", rep.selected_ref},
                                 {"s_used", rep.s_used},
                                 {"warnings", rep.warnings}};
                std::cout << j.dump(2) << "\n";
            } else {
                std::cout << "sigma_hat=" << tnle::format_double(rep.sigma_hat) << "\n";
            }
        } else if (inject->parsed()) {
            const auto img = tnle::decode_image(inj_image);
            tnle::encode_image(tnle::awgn(img, tnle::NoiseSpec{inj_sigma, inj_seed}), inj_out);
        } else if (spectrum->parsed()) {
            const auto img = tnle::decode_image(spec_image);
            const auto sp = tnle::bdiag_spectrum(
                tnle::covariance_set(tnle::extract_patches(img, spec_common.window)));
            tnle::write_spectrum_csv(sp, spec_out);
        } else if (bench->parsed()) {
            std::vector<std::string> ids;
            const auto images = load_images(tnle::read_manifest(bench_manifest), &ids);
            const auto bank = tnle::read_bank(bench_bank);
            auto params = make_params(bench_common);
            params.window = bank.window;
            params.n_eigs = bank.n_eigs;
            const auto res = tnle::benchmark(images, bench_sigmas, bank, params, bench_seed, ids);
            tnle::write_results(res.rows, bench_out);
            if (!bench_metrics.empty()) tnle::write_metrics(res.metrics, bench_metrics);
            std::cout << res.rows.size() << " result row(s) -> " << bench_out << "\n";
        }
    } catch (const tnle::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const tnle::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
