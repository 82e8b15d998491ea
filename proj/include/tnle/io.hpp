#pragma once

#include <string>
#include <vector>

#include "tnle/model.hpp"
#include "tnle/pipeline.hpp"
#include "tnle/spectral.hpp"
#include "tnle/tensor.hpp"

namespace tnle {

/// Ordered list of image paths; entries are stored already resolved
/// against base_dir (the manifest file's directory).
struct Manifest {
    std::vector<std::string> entries;
    std::string base_dir;
};

/// Decodes PPM (P6 binary, P3 ASCII), PGM (P5/P2, replicated to three
/// channels with a warning to stderr), or uncompressed 24-bit BMP into an
/// n1 x n2 x 3 tensor with values in [0,255], channels R,G,B.
Tensor3 decode_image(const std::string& path);

/// Writes binary PPM (P6), rounding to nearest and clamping to [0,255] at
/// export only.
void encode_image(const Tensor3& t, const std::string& path);

Manifest read_manifest(const std::string& path);

/// Bank text format v1: header "tnle-bank v1 M1=<int> n=<int>", one line
/// per entry "sigma_ref theta0 ... thetan", optional "pooled theta0 ...",
/// '#' comments. Doubles printed with 17 significant digits so the round
/// trip is bit-identical.
void write_bank(const CoefficientBank& bank, const std::string& path);
CoefficientBank read_bank(const std::string& path);

/// Results CSV with header
/// image_id,sigma_true,method,sigma_hat,abs_error,s_used,n,M1,seed
/// RFC-4180 quoting and \n line endings.
void write_results(const std::vector<ResultRow>& rows, const std::string& path);

/// Metrics CSV: sigma_true,method,rmse_spread,rmse_truth,mae,n_samples.
void write_metrics(const std::vector<MetricRow>& metrics, const std::string& path);

/// One eigenvalue per line, ascending.
void write_spectrum_csv(const Spectrum& sp, const std::string& path);

/// Shortest round-trip decimal for a double (printf %.17g).
std::string format_double(double v);

} // namespace tnle
