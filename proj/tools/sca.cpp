// Command-line surface: wires the generators, kernel Markov models,
// spectral embeddings, bandwidth selection, nodal maps, spiral experiments,
// coarse-graining, and the 1-d quadrature oracle into reproducible runs.
// Every run writes its outputs plus one manifest JSON describing the full
// configuration, seed, versions, invariant checks, and warnings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sca/bandwidth.hpp"
#include "sca/coarsegrain.hpp"
#include "sca/diffusion.hpp"
#include "sca/errors.hpp"
#include "sca/geodesic.hpp"
#include "sca/io.hpp"
#include "sca/kernelgraph.hpp"
#include "sca/markov.hpp"
#include "sca/nodal.hpp"
#include "sca/nystrom.hpp"
#include "sca/oracle.hpp"
#include "sca/pointcloud.hpp"
#include "sca/spectral.hpp"
#include "sca/studies.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitParse = 2;
constexpr int kExitParameter = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitDisconnected = 5;

constexpr const char* kVersion = "1.0.0";

// Raised when --fail-on-disconnected is set and a run produced disconnected
// realizations; mapped to its own exit code.
class DisconnectedError : public sca::Error {
 public:
  using sca::Error::Error;
};

json version_block() {
  return json{{"artifact", kVersion},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                            std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)}};
}

void write_manifest(const std::string& path, const std::string& command,
                    const json& config, std::uint64_t seed,
                    const sca::Warnings& warnings,
                    const std::vector<std::string>& outputs,
                    const json& extra) {
  json manifest;
  manifest["schema"] = "sca/1";
  manifest["command"] = command;
  manifest["config"] = config;
  manifest["seed"] = seed;
  manifest["versions"] = version_block();
  manifest["warnings"] = warnings;
  manifest["outputs"] = outputs;
  for (const auto& [key, value] : extra.items()) manifest[key] = value;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw sca::ParseError("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw sca::ParseError("write to '" + path + "' failed");
}

sca::PointCloud load_cloud(const std::string& path, bool label_column,
                           std::vector<int>* labels_out) {
  const Eigen::MatrixXd raw = sca::read_csv(path);
  sca::PointCloud cloud;
  if (!label_column) {
    cloud.points = raw;
    return cloud;
  }
  if (raw.cols() < 2) {
    throw sca::ParseError("'" + path +
                          "' needs at least one coordinate column "
                          "besides the label column");
  }
  std::vector<int> labels(static_cast<std::size_t>(raw.rows()));
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double value = raw(i, raw.cols() - 1);
    if (value != std::floor(value)) {
      throw sca::ParseError("label column holds non-integer value at row " +
                            std::to_string(i));
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(value);
  }
  cloud.points = raw.leftCols(raw.cols() - 1);
  cloud.labels = labels;
  if (labels_out != nullptr) *labels_out = std::move(labels);
  return cloud;
}

json fit_invariants(const sca::MarkovChain& chain,
                    const sca::SpectralDecomposition& dec) {
  const double row_dev =
      (chain.transition.rowwise().sum().array() - 1.0).abs().maxCoeff();
  double normalization_dev = 0.0;
  for (int l = 0; l <= dec.q; ++l) {
    const double norm = dec.psi.col(l).cwiseAbs2().dot(dec.stationary);
    normalization_dev = std::max(normalization_dev, std::abs(norm - 1.0));
  }
  const sca::BiorthogonalityReport bio = sca::biorthogonality_check(dec);
  return json{{"row_stochasticity_deviation", row_dev},
              {"eigen_residual_max", dec.max_residual},
              {"normalization_max_deviation", normalization_dev},
              {"biorthogonality_off_diagonal", bio.max_off_diagonal},
              {"degenerate_pairs", dec.degenerate_pairs}};
}

// ---- bandwidth source -------------------------------------------------------

// Exactly one bandwidth source per run: an explicit --epsilon XOR a
// selection --rule. A rule resolves to a grid point before fitting and its
// summary is recorded in the manifest.
struct BandwidthFlags {
  double epsilon = 0.0;
  bool epsilon_set = false;
  std::string rule;
  std::vector<double> grid;
  int ell = 1;
  int B = 50;
  double cutoff = 5.0;
  int k = 100;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--epsilon", epsilon,
                    "kernel bandwidth (exclusive with --rule)");
    cmd->add_option("--rule", rule,
                    "bandwidth selection rule: snr, snr-nodal, neighborhood, "
                    "or mst (exclusive with --epsilon)")
        ->check(CLI::IsMember({"snr", "snr-nodal", "neighborhood", "mst"}));
    cmd->add_option("--grid", grid_text,
                    "comma-separated candidate bandwidths for grid rules");
    cmd->add_option("--ell", ell, "eigenvector index for snr rules");
    cmd->add_option("--bootstrap", B, "bootstrap replicates for snr rules");
    cmd->add_option("--cutoff", cutoff, "snr acceptance threshold");
    cmd->add_option("--neighbors", k, "target median neighbor count");
  }

  void finalize(CLI::App* cmd) {
    epsilon_set = cmd->count("--epsilon") > 0;
    if (!grid_text.empty()) grid = sca::parse_double_list(grid_text);
  }

  json config() const {
    json c{{"ell", ell}, {"bootstrap", B}, {"cutoff", cutoff},
           {"neighbors", k}};
    if (epsilon_set) c["epsilon"] = epsilon;
    if (!rule.empty()) c["rule"] = rule;
    if (!grid.empty()) c["grid"] = grid;
    return c;
  }

  std::string grid_text;
};

double resolve_bandwidth(const sca::PointCloud& cloud,
                         const BandwidthFlags& flags, std::uint64_t seed,
                         json* selection, sca::Warnings* warnings) {
  if (flags.epsilon_set == !flags.rule.empty()) {
    throw sca::ParameterError(
        "exactly one bandwidth source required: --epsilon or --rule");
  }
  if (flags.epsilon_set) return flags.epsilon;

  std::optional<double> chosen;
  json summary{{"rule", flags.rule}, {"seed", seed}};
  if (flags.rule == "mst") {
    const sca::MstSelection mst = sca::mst_rule(cloud);
    chosen = mst.epsilon;
    summary["longest_edge"] = mst.longest_edge;
  } else if (flags.rule == "neighborhood") {
    if (flags.grid.empty()) {
      throw sca::ParameterError("rule '" + flags.rule + "' needs --grid");
    }
    const sca::NeighborhoodSelection sel =
        sca::neighborhood_rule(cloud, flags.grid, flags.k);
    chosen = sel.selected;
    summary["k"] = flags.k;
    summary["medians"] = sel.medians;
  } else {
    if (flags.grid.empty()) {
      throw sca::ParameterError("rule '" + flags.rule + "' needs --grid");
    }
    const sca::SnrCurve curve =
        flags.rule == "snr"
            ? sca::bootstrap_snr(cloud, flags.ell, flags.grid, flags.B,
                                 flags.cutoff, seed)
            : sca::bootstrap_snr_nodal(cloud, flags.ell, flags.grid, flags.B,
                                       flags.cutoff, seed);
    chosen = curve.selected;
    summary["threshold"] = curve.threshold;
    summary["B"] = curve.B;
    json snr = json::array();
    for (double v : curve.snr) {
      if (std::isinf(v)) {
        snr.push_back("inf");
      } else {
        snr.push_back(v);
      }
    }
    summary["snr"] = snr;
    summary["skipped"] = curve.skipped;
  }
  if (!chosen.has_value()) {
    throw sca::ParameterError("rule '" + flags.rule +
                              "' selected no bandwidth on the given grid");
  }
  summary["epsilon"] = *chosen;
  if (selection != nullptr) *selection = summary;
  sca::warn(warnings, "bandwidth " + sca::format_double(*chosen) +
                     " selected by rule " + flags.rule);
  return *chosen;
}

// ---- presets ----------------------------------------------------------------

// A preset JSON supplies defaults for flags the user left unset. An explicit
// --rule suppresses the preset's epsilon so the run still has exactly one
// bandwidth source.
void apply_preset(const std::string& path, CLI::App* cmd,
                  BandwidthFlags* bandwidth, long* m, int* q, int* k) {
  std::ifstream in(path);
  if (!in) throw sca::ParseError("cannot open preset '" + path + "'");
  json preset;
  try {
    in >> preset;
  } catch (const json::exception& e) {
    throw sca::ParseError("preset '" + path + "': " + e.what());
  }
  if (bandwidth != nullptr) {
    if (preset.contains("epsilon") && cmd->count("--epsilon") == 0 &&
        cmd->count("--rule") == 0) {
      bandwidth->epsilon = preset["epsilon"].get<double>();
      bandwidth->epsilon_set = true;
    }
    if (preset.contains("snr_cutoff") && cmd->count("--cutoff") == 0) {
      bandwidth->cutoff = preset["snr_cutoff"].get<double>();
    }
  }
  if (m != nullptr && preset.contains("m") && cmd->count("--m") == 0) {
    *m = preset["m"].get<long>();
  }
  if (q != nullptr && preset.contains("q") && cmd->count("--q") == 0) {
    *q = preset["q"].get<int>();
  }
  if (k != nullptr && preset.contains("k") && cmd->count("--k") == 0) {
    *k = preset["k"].get<int>();
  }
}

// ---- density flags ----------------------------------------------------------

struct DensityFlags {
  std::string means_text = "-2,2";
  std::string sds_text = "1,1";
  std::string weights_text = "0.5,0.5";
  std::string segments_text;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--means", means_text, "mixture component means");
    cmd->add_option("--sds", sds_text, "mixture component sds");
    cmd->add_option("--weights", weights_text, "mixture component weights");
    cmd->add_option("--segments", segments_text,
                    "uniform segments lo:hi:weight, comma-separated");
  }

  sca::Density1D build() const {
    sca::Density1D density;
    const std::vector<double> means = sca::parse_double_list(means_text);
    const std::vector<double> sds = sca::parse_double_list(sds_text);
    const std::vector<double> weights = sca::parse_double_list(weights_text);
    if (means.size() != sds.size() || means.size() != weights.size()) {
      throw sca::ParameterError(
          "means, sds, and weights must have equal length");
    }
    for (std::size_t i = 0; i < means.size(); ++i) {
      density.gaussians.push_back({means[i], sds[i], weights[i]});
    }
    if (!segments_text.empty()) {
      std::stringstream parts(segments_text);
      std::string part;
      while (std::getline(parts, part, ',')) {
        std::stringstream fields(part);
        std::string lo, hi, w;
        if (!std::getline(fields, lo, ':') || !std::getline(fields, hi, ':') ||
            !std::getline(fields, w, ':')) {
          throw sca::ParseError("segment '" + part + "' is not lo:hi:weight");
        }
        density.segments.push_back({sca::parse_double_list(lo).at(0),
                                    sca::parse_double_list(hi).at(0),
                                    sca::parse_double_list(w).at(0)});
      }
    }
    return density;
  }

  json config() const {
    json c{{"means", means_text}, {"sds", sds_text},
           {"weights", weights_text}};
    if (!segments_text.empty()) c["segments"] = segments_text;
    return c;
  }
};

std::string default_manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

Eigen::MatrixXd eigenpair_rows(const sca::SpectralDecomposition& dec) {
  Eigen::MatrixXd rows(dec.q + 1, dec.psi.rows() + 1);
  for (int l = 0; l <= dec.q; ++l) {
    rows(l, 0) = dec.eigenvalues(l);
    rows.row(l).tail(dec.psi.rows()) = dec.psi.col(l).transpose();
  }
  return rows;
}

// ---- subcommand: generate ---------------------------------------------------

struct GenerateCmd {
  std::string kind;
  long n = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  bool labels = false;

  std::string means_text = "-2,2";
  std::string sds_text = "1,1";
  std::string weights_text = "0.5,0.5";
  sca::SpiralParams spiral;
  sca::ParallelLinesParams lines;
  sca::TwoPointMassParams masses;
  sca::RingBlobNoiseParams ring;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "sample a synthetic cloud");
    cmd->add_option("--kind", kind, "generator")
        ->required()
        ->check(CLI::IsMember({"gaussian-mixture", "spiral", "parallel-lines",
                               "two-point-masses", "ring-blob-noise"}));
    cmd->add_option("--n", n, "sample size")->required();
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out, "output cloud CSV")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->add_flag("--labels", labels, "append component labels");
    cmd->add_option("--means", means_text, "mixture means");
    cmd->add_option("--sds", sds_text, "mixture sds");
    cmd->add_option("--weights", weights_text, "mixture weights");
    cmd->add_option("--spiral-a", spiral.a, "spiral radial exponent");
    cmd->add_option("--spiral-b", spiral.b, "spiral angular rate");
    cmd->add_option("--noise-mean", spiral.noise_mean,
                    "exponential noise mean");
    cmd->add_option("--t-min", spiral.t_min, "spiral parameter lower end");
    cmd->add_option("--t-max", spiral.t_max, "spiral parameter upper end");
    cmd->add_option("--length", lines.length, "line length");
    cmd->add_option("--gap", lines.gap, "line separation");
    cmd->add_option("--x0", masses.x0, "first atom");
    cmd->add_option("--x1", masses.x1, "second atom");
    cmd->add_option("--w0", masses.w0, "first atom weight");
    cmd->add_option("--w1", masses.w1, "second atom weight");
    cmd->add_option("--jitter-sd", masses.jitter_sd, "atom jitter sd");
    cmd->add_option("--ring-radius", ring.ring_radius, "ring radius");
    cmd->add_option("--ring-sd", ring.ring_sd, "ring thickness sd");
    cmd->add_option("--blob-sd", ring.blob_sd, "central blob sd");
    cmd->add_option("--box-half", ring.box_half, "clutter box half-width");
    cmd->add_option("--w-ring", ring.w_ring, "ring weight");
    cmd->add_option("--w-blob", ring.w_blob, "blob weight");
    cmd->add_option("--w-noise", ring.w_noise, "clutter weight");
    cmd->callback([this] { run(); });
  }

  void run() const {
    sca::GeneratorParams params;
    json config{{"kind", kind}, {"n", n}, {"labels", labels}};
    if (kind == "gaussian-mixture") {
      sca::GaussianMixtureParams mix;
      const std::vector<double> means = sca::parse_double_list(means_text);
      const std::vector<double> sds = sca::parse_double_list(sds_text);
      const std::vector<double> weights =
          sca::parse_double_list(weights_text);
      if (means.size() != sds.size() || means.size() != weights.size()) {
        throw sca::ParameterError(
            "means, sds, and weights must have equal length");
      }
      for (std::size_t i = 0; i < means.size(); ++i) {
        mix.means.push_back(Eigen::VectorXd::Constant(1, means[i]));
        mix.sds.push_back(sds[i]);
        mix.weights.push_back(weights[i]);
      }
      config["means"] = means;
      config["sds"] = sds;
      config["weights"] = weights;
      params = mix;
    } else if (kind == "spiral") {
      config["a"] = spiral.a;
      config["b"] = spiral.b;
      config["noise_mean"] = spiral.noise_mean;
      config["t_min"] = spiral.t_min;
      config["t_max"] = spiral.t_max;
      params = spiral;
    } else if (kind == "parallel-lines") {
      config["length"] = lines.length;
      config["gap"] = lines.gap;
      params = lines;
    } else if (kind == "two-point-masses") {
      config["x0"] = masses.x0;
      config["x1"] = masses.x1;
      config["w0"] = masses.w0;
      config["w1"] = masses.w1;
      config["jitter_sd"] = masses.jitter_sd;
      params = masses;
    } else {
      config["ring_radius"] = ring.ring_radius;
      config["ring_sd"] = ring.ring_sd;
      config["blob_sd"] = ring.blob_sd;
      config["box_half"] = ring.box_half;
      config["w_ring"] = ring.w_ring;
      config["w_blob"] = ring.w_blob;
      config["w_noise"] = ring.w_noise;
      params = ring;
    }
    const sca::PointCloud cloud = sca::generate({params, seed}, n);
    sca::Warnings warnings;
    if (labels && cloud.labels.has_value()) {
      sca::write_csv(out, cloud.points, *cloud.labels);
    } else {
      if (labels) {
        sca::warn(&warnings, "generator '" + kind +
                            "' emits no labels; plain CSV written");
      }
      sca::write_csv(out, cloud.points);
    }
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "generate", config, seed, warnings, {out}, {});
  }
};

// ---- subcommand: embed ------------------------------------------------------

struct EmbedCmd {
  std::string input;
  bool label_column = false;
  BandwidthFlags bandwidth;
  long m = 1;
  int q = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string eigen_out;
  std::string manifest;
  std::string preset;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("embed",
                             "fit the kernel Markov model and export the "
                             "diffusion embedding");
    cmd->add_option("--input", input, "cloud CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    bandwidth.add_options(cmd);
    cmd->add_option("--m", m, "diffusion steps");
    cmd->add_option("--q", q, "embedding order");
    cmd->add_option("--seed", seed, "RNG seed for selection rules");
    cmd->add_option("--out", out, "embedding CSV")->required();
    cmd->add_option("--eigen-out", eigen_out,
                    "optional eigenpairs CSV: row l = lambda_l, psi_l");
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->add_option("--preset", preset, "JSON preset supplying defaults");
    cmd->callback([this] { run(); });
  }

  void run() {
    bandwidth.finalize(cmd);
    if (!preset.empty()) {
      apply_preset(preset, cmd, &bandwidth, &m, &q, nullptr);
    }
    if (q < 1) throw sca::ParameterError("--q >= 1 required");
    std::vector<int> labels;
    const sca::PointCloud cloud = load_cloud(input, label_column, &labels);
    sca::Warnings warnings;
    json selection;
    const double eps =
        resolve_bandwidth(cloud, bandwidth, seed, &selection, &warnings);
    const sca::KernelGraph graph = sca::build_kernel(cloud, eps);
    const sca::MarkovChain chain = sca::build_markov(graph);
    const sca::SpectralDecomposition dec =
        sca::decompose(chain, q, sca::EigenMethod::automatic, &warnings);
    const sca::DiffusionEmbedding embedding = sca::embed(dec, m, q);

    std::vector<std::string> outputs{out};
    if (label_column) {
      sca::write_csv(out, embedding.coords, labels);
    } else {
      sca::write_csv(out, embedding.coords);
    }
    if (!eigen_out.empty()) {
      sca::write_csv(eigen_out, eigenpair_rows(dec));
      outputs.push_back(eigen_out);
    }
    json config{{"input", input}, {"m", m}, {"q", q},
                {"label_column", label_column},
                {"bandwidth", bandwidth.config()}};
    if (!preset.empty()) config["preset"] = preset;
    json extra{{"invariants", fit_invariants(chain, dec)},
               {"epsilon", eps}};
    if (!selection.is_null()) extra["selection"] = selection;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "embed", config, seed, warnings, outputs, extra);
  }
};

// ---- subcommand: extend -----------------------------------------------------

struct ExtendCmd {
  std::string input;
  std::string query;
  bool label_column = false;
  BandwidthFlags bandwidth;
  long m = 1;
  int q = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand(
        "extend", "evaluate the diffusion embedding at new points");
    cmd->add_option("--input", input, "training cloud CSV")->required();
    cmd->add_option("--query", query, "query points CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "training input carries a trailing label column");
    bandwidth.add_options(cmd);
    cmd->add_option("--m", m, "diffusion steps");
    cmd->add_option("--q", q, "embedding order")->required();
    cmd->add_option("--seed", seed, "RNG seed for selection rules");
    cmd->add_option("--out", out, "extended embedding CSV")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  void run() {
    bandwidth.finalize(cmd);
    const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
    const Eigen::MatrixXd query_points = sca::read_csv(query);
    sca::Warnings warnings;
    json selection;
    const double eps =
        resolve_bandwidth(cloud, bandwidth, seed, &selection, &warnings);
    const sca::KernelGraph graph = sca::build_kernel(cloud, eps);
    const sca::MarkovChain chain = sca::build_markov(graph);
    const sca::SpectralDecomposition dec =
        sca::decompose(chain, q, sca::EigenMethod::automatic, &warnings);
    const Eigen::MatrixXd coords =
        sca::extend_embedding(cloud, dec, m, q, {query_points});
    sca::write_csv(out, coords);
    json config{{"input", input}, {"query", query}, {"m", m}, {"q", q},
                {"bandwidth", bandwidth.config()}};
    json extra{{"invariants", fit_invariants(chain, dec)},
               {"epsilon", eps}};
    if (!selection.is_null()) extra["selection"] = selection;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "extend", config, seed, warnings, {out}, extra);
  }
};

// ---- subcommand: distance ---------------------------------------------------

struct DistanceCmd {
  std::string input;
  bool label_column = false;
  BandwidthFlags bandwidth;
  long m = 1;
  int q = 0;
  std::string pairs_text;
  std::string pairs_file;
  std::string method = "spectral";
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("distance",
                             "diffusion distances between index pairs");
    cmd->add_option("--input", input, "cloud CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    bandwidth.add_options(cmd);
    cmd->add_option("--m", m, "diffusion steps");
    cmd->add_option("--q", q, "spectral order (spectral method)");
    cmd->add_option("--pairs", pairs_text, "pairs i:j, comma-separated");
    cmd->add_option("--pairs-file", pairs_file, "two-column CSV of pairs");
    cmd->add_option("--method", method, "spectral or direct")
        ->check(CLI::IsMember({"spectral", "direct"}));
    cmd->add_option("--seed", seed, "RNG seed for selection rules");
    cmd->add_option("--out", out, "distance CSV: i, j, distance")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> parse_pairs() const {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    if (!pairs_text.empty()) {
      std::stringstream parts(pairs_text);
      std::string part;
      while (std::getline(parts, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) {
          throw sca::ParseError("pair '" + part + "' is not i:j");
        }
        pairs.emplace_back(
            static_cast<Eigen::Index>(
                sca::parse_double_list(part.substr(0, colon)).at(0)),
            static_cast<Eigen::Index>(
                sca::parse_double_list(part.substr(colon + 1)).at(0)));
      }
    }
    if (!pairs_file.empty()) {
      const Eigen::MatrixXd table = sca::read_csv(pairs_file);
      if (table.cols() != 2) {
        throw sca::ParseError("pairs file must have exactly two columns");
      }
      for (Eigen::Index r = 0; r < table.rows(); ++r) {
        pairs.emplace_back(static_cast<Eigen::Index>(table(r, 0)),
                           static_cast<Eigen::Index>(table(r, 1)));
      }
    }
    if (pairs.empty()) {
      throw sca::ParameterError("no index pairs given: --pairs or "
                                "--pairs-file required");
    }
    return pairs;
  }

  void run() {
    bandwidth.finalize(cmd);
    const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
    const auto pairs = parse_pairs();
    sca::Warnings warnings;
    json selection;
    const double eps =
        resolve_bandwidth(cloud, bandwidth, seed, &selection, &warnings);
    const sca::KernelGraph graph = sca::build_kernel(cloud, eps);
    const sca::MarkovChain chain = sca::build_markov(graph);

    Eigen::MatrixXd table(static_cast<Eigen::Index>(pairs.size()), 3);
    json extra{{"epsilon", eps}};
    if (method == "spectral") {
      if (q < 1) {
        throw sca::ParameterError("spectral distances need --q >= 1");
      }
      const sca::SpectralDecomposition dec =
          sca::decompose(chain, q, sca::EigenMethod::automatic, &warnings);
      for (std::size_t r = 0; r < pairs.size(); ++r) {
        table(static_cast<Eigen::Index>(r), 0) =
            static_cast<double>(pairs[r].first);
        table(static_cast<Eigen::Index>(r), 1) =
            static_cast<double>(pairs[r].second);
        table(static_cast<Eigen::Index>(r), 2) = sca::diffusion_distance_spectral(
            dec, m, pairs[r].first, pairs[r].second, q);
      }
      extra["invariants"] = fit_invariants(chain, dec);
    } else {
      const Eigen::MatrixXd power = sca::m_step(chain, m);
      for (std::size_t r = 0; r < pairs.size(); ++r) {
        table(static_cast<Eigen::Index>(r), 0) =
            static_cast<double>(pairs[r].first);
        table(static_cast<Eigen::Index>(r), 1) =
            static_cast<double>(pairs[r].second);
        table(static_cast<Eigen::Index>(r), 2) = sca::diffusion_distance_direct(
            power, chain.stationary, pairs[r].first, pairs[r].second);
      }
    }
    sca::write_csv(out, table);
    json config{{"input", input}, {"m", m}, {"q", q}, {"method", method},
                {"bandwidth", bandwidth.config()}};
    if (!selection.is_null()) extra["selection"] = selection;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "distance", config, seed, warnings, {out}, extra);
  }
};

// ---- subcommand: select-bandwidth -------------------------------------------

struct SelectCmd {
  std::string input;
  bool label_column = false;
  std::string rule;
  std::string grid_text;
  int ell = 1;
  int B = 50;
  double cutoff = 5.0;
  int k = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::string curve_out;
  std::string manifest;
  std::string preset;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("select-bandwidth",
                             "choose a bandwidth by a data-driven rule");
    cmd->add_option("--input", input, "cloud CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    cmd->add_option("--rule", rule, "snr, snr-nodal, neighborhood, or mst")
        ->required()
        ->check(CLI::IsMember({"snr", "snr-nodal", "neighborhood", "mst"}));
    cmd->add_option("--grid", grid_text, "candidate bandwidths");
    cmd->add_option("--ell", ell, "eigenvector index for snr rules");
    cmd->add_option("--bootstrap", B, "bootstrap replicates");
    cmd->add_option("--cutoff", cutoff, "snr acceptance threshold");
    cmd->add_option("--k", k, "target median neighbor count");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out, "selection summary JSON")->required();
    cmd->add_option("--curve-out", curve_out, "per-bandwidth curve CSV");
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->add_option("--preset", preset, "JSON preset supplying defaults");
    cmd->callback([this] { run(); });
  }

  void run() {
    if (!preset.empty()) {
      BandwidthFlags scratch;
      apply_preset(preset, cmd, &scratch, nullptr, nullptr, &k);
      if (scratch.epsilon_set) {
        // A preset epsilon is no selection rule; it only matters to fits.
      }
      if (cmd->count("--cutoff") == 0) cutoff = scratch.cutoff;
    }
    const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
    const std::vector<double> grid =
        grid_text.empty() ? std::vector<double>{}
                          : sca::parse_double_list(grid_text);
    sca::Warnings warnings;
    json summary{{"rule", rule}, {"seed", seed}};
    std::optional<double> chosen;
    std::vector<std::string> outputs{out};

    if (rule == "mst") {
      const sca::MstSelection mst = sca::mst_rule(cloud);
      chosen = mst.epsilon;
      summary["longest_edge"] = mst.longest_edge;
      summary["threshold"] = nullptr;
      summary["B"] = nullptr;
    } else if (rule == "neighborhood") {
      if (grid.empty()) throw sca::ParameterError("--grid required");
      const sca::NeighborhoodSelection sel =
          sca::neighborhood_rule(cloud, grid, k);
      chosen = sel.selected;
      summary["threshold"] = k;
      summary["B"] = nullptr;
      if (!curve_out.empty()) {
        Eigen::MatrixXd curve(static_cast<Eigen::Index>(grid.size()), 2);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          curve(static_cast<Eigen::Index>(i), 0) = grid[i];
          curve(static_cast<Eigen::Index>(i), 1) = sel.medians[i];
        }
        sca::write_csv(curve_out, curve);
        outputs.push_back(curve_out);
      }
    } else {
      if (grid.empty()) throw sca::ParameterError("--grid required");
      const sca::SnrCurve curve =
          rule == "snr"
              ? sca::bootstrap_snr(cloud, ell, grid, B, cutoff, seed)
              : sca::bootstrap_snr_nodal(cloud, ell, grid, B, cutoff, seed);
      chosen = curve.selected;
      summary["threshold"] = curve.threshold;
      summary["B"] = curve.B;
      summary["ell"] = curve.ell;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (curve.degenerate[i]) {
          sca::warn(&warnings, "degenerate eigenvalues at bandwidth " +
                              sca::format_double(grid[i]));
        }
      }
      if (!curve_out.empty()) {
        Eigen::MatrixXd table(static_cast<Eigen::Index>(grid.size()), 4);
        for (std::size_t i = 0; i < grid.size(); ++i) {
          table(static_cast<Eigen::Index>(i), 0) = grid[i];
          table(static_cast<Eigen::Index>(i), 1) = curve.snr[i];
          table(static_cast<Eigen::Index>(i), 2) =
              curve.degenerate[i] ? 1.0 : 0.0;
          table(static_cast<Eigen::Index>(i), 3) = curve.skipped[i];
        }
        sca::write_csv(curve_out, table);
        outputs.push_back(curve_out);
      }
    }
    if (chosen.has_value()) {
      summary["epsilon"] = *chosen;
    } else {
      summary["epsilon"] = nullptr;
      sca::warn(&warnings, "rule '" + rule +
                          "' selected no bandwidth on the given grid");
    }
    std::ofstream sfile(out, std::ios::binary | std::ios::trunc);
    if (!sfile) throw sca::ParseError("cannot open '" + out + "'");
    sfile << summary.dump(2) << '\n';

    json config{{"input", input}, {"rule", rule}, {"ell", ell},
                {"bootstrap", B}, {"cutoff", cutoff}, {"k", k}};
    if (!grid.empty()) config["grid"] = grid;
    if (!preset.empty()) config["preset"] = preset;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "select-bandwidth", config, seed, warnings, outputs,
                   json{{"selection", summary}});
  }
};

// ---- subcommand: nodal ------------------------------------------------------

struct NodalCmd {
  std::string input;
  bool label_column = false;
  BandwidthFlags bandwidth;
  int q = 4;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("nodal",
                             "sign maps of the leading eigenvectors");
    cmd->add_option("--input", input, "cloud CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    bandwidth.add_options(cmd);
    cmd->add_option("--q", q, "number of eigenvectors (1..q)");
    cmd->add_option("--seed", seed, "RNG seed for selection rules");
    cmd->add_option("--out", out, "CSV: row l = l, sign(psi_l)")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  void run() {
    bandwidth.finalize(cmd);
    const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
    sca::Warnings warnings;
    json selection;
    const double eps =
        resolve_bandwidth(cloud, bandwidth, seed, &selection, &warnings);
    const sca::KernelGraph graph = sca::build_kernel(cloud, eps);
    const sca::MarkovChain chain = sca::build_markov(graph);
    const sca::SpectralDecomposition dec =
        sca::decompose(chain, q, sca::EigenMethod::automatic, &warnings);
    Eigen::MatrixXd table(q, cloud.size() + 1);
    for (int l = 1; l <= q; ++l) {
      const sca::NodalMap map = sca::nodal_map(dec, l);
      table(l - 1, 0) = l;
      table.row(l - 1).tail(cloud.size()) =
          map.signs.cast<double>().transpose();
    }
    sca::write_csv(out, table);
    json config{{"input", input}, {"q", q},
                {"bandwidth", bandwidth.config()}};
    json extra{{"invariants", fit_invariants(chain, dec)},
               {"epsilon", eps}};
    if (!selection.is_null()) extra["selection"] = selection;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "nodal", config, seed, warnings, {out}, extra);
  }
};

// ---- subcommand: spiral-experiment ------------------------------------------

struct SpiralCmd {
  std::string variant;
  sca::SpiralSensitivityConfig sens;
  sca::SpiralConsistencyConfig cons;
  std::string sizes_text = "600,2000,4000";
  bool fail_on_disconnected = false;
  std::string out;
  std::string manifest;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("spiral-experiment",
                             "noise response of geodesic vs diffusion "
                             "distances on the spiral");
    cmd->add_option("--variant", variant, "sensitivity or consistency")
        ->required()
        ->check(CLI::IsMember({"sensitivity", "consistency"}));
    cmd->add_option("--beta", sens.beta, "exponential noise mean");
    cmd->add_option("--tau", sens.tau, "neighborhood threshold");
    cmd->add_option("--n", sens.n, "sample size (sensitivity)");
    cmd->add_option("--reps", sens.reps, "noisy realizations");
    cmd->add_option("--baseline-reps", sens.baseline_reps,
                    "noiseless realizations (sensitivity)");
    cmd->add_option("--m", sens.m, "diffusion steps (sensitivity)");
    cmd->add_option("--sizes", sizes_text, "sample sizes (consistency)");
    cmd->add_option("--seed", sens.seed, "RNG seed");
    cmd->add_flag("--fail-on-disconnected", fail_on_disconnected,
                  "treat disconnected realizations as an error");
    cmd->add_option("--out", out, "result CSV")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  void run() {
    sca::Warnings warnings;
    json config{{"variant", variant}, {"beta", sens.beta},
                {"fail_on_disconnected", fail_on_disconnected}};
    json extra;
    Eigen::MatrixXd table;
    std::uint64_t seed = sens.seed;

    if (variant == "sensitivity") {
      if (cmd->count("--tau") == 0) sens.tau = 0.15;
      config["tau"] = sens.tau;
      config["n"] = sens.n;
      config["reps"] = sens.reps;
      config["baseline_reps"] = sens.baseline_reps;
      config["m"] = sens.m;
      const sca::SpiralSensitivityResult result =
          sca::spiral_sensitivity_experiment(sens);
      if (result.disconnected > 0 || result.baseline_disconnected > 0) {
        sca::warn(&warnings,
             std::to_string(result.disconnected) + " noisy and " +
                 std::to_string(result.baseline_disconnected) +
                 " noiseless realizations were disconnected and excluded");
        if (fail_on_disconnected) {
          throw DisconnectedError("disconnected spiral realizations");
        }
      }
      const auto count = static_cast<Eigen::Index>(result.geodesic.size());
      table.resize(count, 4);
      for (Eigen::Index r = 0; r < count; ++r) {
        table(r, 0) = result.geodesic[static_cast<std::size_t>(r)];
        table(r, 1) = result.diffusion[static_cast<std::size_t>(r)];
        table(r, 2) = result.geodesic_rel_change[static_cast<std::size_t>(r)];
        table(r, 3) = result.diffusion_rel_change[static_cast<std::size_t>(r)];
      }
      extra = json{{"baseline_geodesic", result.baseline_geodesic},
                   {"baseline_diffusion", result.baseline_diffusion},
                   {"disconnected", result.disconnected},
                   {"baseline_disconnected", result.baseline_disconnected},
                   {"arc_length", result.arc_length},
                   {"euclidean", result.euclidean}};
    } else {
      cons.beta = sens.beta;
      cons.tau = cmd->count("--tau") > 0 ? sens.tau : 0.1;
      cons.reps = cmd->count("--reps") > 0 ? sens.reps : 100;
      cons.seed = sens.seed;
      cons.sizes.clear();
      for (double s : sca::parse_double_list(sizes_text)) {
        cons.sizes.push_back(static_cast<Eigen::Index>(s));
      }
      config["tau"] = cons.tau;
      config["reps"] = cons.reps;
      config["sizes"] = sizes_text;
      const sca::SpiralConsistencyResult result =
          sca::spiral_consistency_experiment(cons);
      long disconnected_total = 0;
      for (std::size_t s = 0; s < result.sizes.size(); ++s) {
        disconnected_total += result.disconnected[s];
      }
      if (disconnected_total > 0) {
        sca::warn(&warnings, std::to_string(disconnected_total) +
                            " realizations were disconnected and excluded");
        if (fail_on_disconnected) {
          throw DisconnectedError("disconnected spiral realizations");
        }
      }
      Eigen::Index rows = 0;
      for (const auto& d : result.distances) {
        rows += static_cast<Eigen::Index>(d.size());
      }
      table.resize(rows, 2);
      Eigen::Index at = 0;
      for (std::size_t s = 0; s < result.sizes.size(); ++s) {
        for (double d : result.distances[s]) {
          table(at, 0) = static_cast<double>(result.sizes[s]);
          table(at, 1) = d;
          ++at;
        }
      }
      extra = json{{"mean_distance", result.mean_distance},
                   {"disconnected", result.disconnected},
                   {"arc_length", result.arc_length},
                   {"euclidean", result.euclidean}};
    }
    sca::write_csv(out, table);
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "spiral-experiment", config, seed, warnings, {out},
                   extra);
  }
};

// ---- subcommand: coarse-grain -----------------------------------------------

struct CoarseCmd {
  std::string input;
  bool label_column = false;
  BandwidthFlags bandwidth;
  long m = 1;
  int q = 0;
  int k = 0;
  int restarts = 10;
  int fidelity = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string assign_out;
  std::string masses_out;
  std::string manifest;
  std::string preset;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("coarse-grain",
                             "k-means quantization of the embedding and the "
                             "aggregated coarse chain");
    cmd->add_option("--input", input, "cloud CSV")->required();
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    bandwidth.add_options(cmd);
    cmd->add_option("--m", m, "diffusion steps");
    cmd->add_option("--q", q, "embedding order");
    cmd->add_option("--k", k, "cluster count");
    cmd->add_option("--restarts", restarts, "k-means restarts");
    cmd->add_option("--fidelity", fidelity,
                    "compare j leading coarse eigenvalues to the fine chain");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out, "coarse transition CSV")->required();
    cmd->add_option("--assign-out", assign_out,
                    "CSV: point index, cluster, representative flag");
    cmd->add_option("--masses-out", masses_out, "cluster mass CSV");
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->add_option("--preset", preset, "JSON preset supplying defaults");
    cmd->callback([this] { run(); });
  }

  void run() {
    bandwidth.finalize(cmd);
    if (!preset.empty()) apply_preset(preset, cmd, &bandwidth, &m, &q, &k);
    if (q < 1) throw sca::ParameterError("--q >= 1 required");
    if (k < 1) throw sca::ParameterError("--k >= 1 required");
    const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
    sca::Warnings warnings;
    json selection;
    const double eps =
        resolve_bandwidth(cloud, bandwidth, seed, &selection, &warnings);
    const sca::KernelGraph graph = sca::build_kernel(cloud, eps);
    const sca::MarkovChain chain = sca::build_markov(graph);
    const sca::SpectralDecomposition dec =
        sca::decompose(chain, q, sca::EigenMethod::automatic, &warnings);
    const sca::DiffusionEmbedding embedding = sca::embed(dec, m, q);
    const sca::Quantization quant =
        sca::kmeans_diffusion(embedding, k, seed, restarts);
    const sca::CoarseChain coarse = sca::coarse_chain(chain, quant, m);

    std::vector<std::string> outputs{out};
    sca::write_csv(out, coarse.transition);
    if (!assign_out.empty()) {
      Eigen::MatrixXd table(cloud.size(), 3);
      for (Eigen::Index i = 0; i < cloud.size(); ++i) {
        const int cluster = quant.assignment[static_cast<std::size_t>(i)];
        table(i, 0) = static_cast<double>(i);
        table(i, 1) = cluster;
        table(i, 2) =
            quant.representatives[static_cast<std::size_t>(cluster)] == i
                ? 1.0
                : 0.0;
      }
      sca::write_csv(assign_out, table);
      outputs.push_back(assign_out);
    }
    if (!masses_out.empty()) {
      sca::write_csv(masses_out, coarse.masses);
      outputs.push_back(masses_out);
    }
    json extra{{"invariants", fit_invariants(chain, dec)},
               {"epsilon", eps},
               {"distortion", quant.distortion}};
    if (fidelity > 0) {
      extra["spectral_fidelity"] = sca::spectral_fidelity(chain, coarse,
                                                          fidelity);
    }
    if (!selection.is_null()) extra["selection"] = selection;
    json config{{"input", input}, {"m", m}, {"q", q}, {"k", k},
                {"restarts", restarts},
                {"bandwidth", bandwidth.config()}};
    if (!preset.empty()) config["preset"] = preset;
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "coarse-grain", config, seed, warnings, outputs,
                   extra);
  }
};

// ---- subcommand: oracle -----------------------------------------------------

struct OracleCmd {
  std::string task;
  DensityFlags density;
  double epsilon = 1e-3;
  long grid_size = 4096;
  int q = 8;
  double t = 1.0;
  long x0 = -1;
  std::string input;
  bool label_column = false;
  std::string eps_grid_text;
  int reference_order = 64;
  std::uint64_t seed = 0;
  std::string out;
  std::string manifest;
  CLI::App* cmd = nullptr;

  void add(CLI::App& app) {
    cmd = app.add_subcommand("oracle",
                             "1-d quadrature ground truth: reference "
                             "eigenfunctions, density evolution, loss curve");
    cmd->add_option("--task", task, "reference, evolve, or loss-curve")
        ->required()
        ->check(CLI::IsMember({"reference", "evolve", "loss-curve"}));
    density.add_options(cmd);
    cmd->add_option("--epsilon", epsilon, "quadrature bandwidth");
    cmd->add_option("--grid-size", grid_size, "quadrature grid size");
    cmd->add_option("--q", q, "eigenfunction count (reference, loss-curve)");
    cmd->add_option("--t", t, "diffusion time (evolve, loss-curve)");
    cmd->add_option("--x0", x0, "start grid index (evolve)");
    cmd->add_option("--input", input, "sample cloud CSV (loss-curve)");
    cmd->add_flag("--label-column", label_column,
                  "input carries a trailing label column");
    cmd->add_option("--eps-grid", eps_grid_text,
                    "fit bandwidths for the loss curve");
    cmd->add_option("--reference-order", reference_order,
                    "reference eigenfunction count for the loss");
    cmd->add_option("--seed", seed, "echoed in the manifest");
    cmd->add_option("--out", out, "output CSV")->required();
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  void run() const {
    sca::Warnings warnings;
    const sca::Density1D dens = density.build();
    const sca::QuadratureModel model =
        sca::quadrature_operator(dens, epsilon, grid_size, &warnings);
    json config{{"task", task}, {"density", density.config()},
                {"epsilon", epsilon}, {"grid_size", grid_size}};
    json extra{{"truncated_mass", model.truncated_mass}};

    if (task == "reference") {
      config["q"] = q;
      const sca::ReferenceEigenfunctions ref = sca::reference_eigenfunctions(
          model, q, sca::EigenMethod::automatic, &warnings);
      Eigen::MatrixXd table(model.grid.size(), q + 3);
      table.col(0) = model.grid;
      table.col(1) = model.weights;
      table.rightCols(q + 1) = ref.psi;
      sca::write_csv(out, table);
      extra["eigenvalues"] = std::vector<double>(
          ref.eigenvalues.data(), ref.eigenvalues.data() + q + 1);
    } else if (task == "evolve") {
      if (x0 < 0) throw sca::ParameterError("--x0 required for evolve");
      config["t"] = t;
      config["x0"] = x0;
      const sca::EvolveResult result = sca::evolve_density(model, t, x0);
      Eigen::MatrixXd table(model.grid.size(), 2);
      table.col(0) = model.grid;
      table.col(1) = result.omega;
      sca::write_csv(out, table);
      extra["steps"] = result.steps;
      extra["mass_deviation"] = result.mass_deviation;
    } else {
      if (input.empty()) {
        throw sca::ParameterError("--input required for loss-curve");
      }
      if (eps_grid_text.empty()) {
        throw sca::ParameterError("--eps-grid required for loss-curve");
      }
      config["t"] = t;
      config["q"] = q;
      config["input"] = input;
      config["eps_grid"] = eps_grid_text;
      config["reference_order"] = reference_order;
      const sca::PointCloud cloud = load_cloud(input, label_column, nullptr);
      const std::vector<double> eps_grid =
          sca::parse_double_list(eps_grid_text);
      const int order = std::min<int>(
          reference_order, static_cast<int>(model.grid.size()) - 1);
      const sca::ReferenceEigenfunctions reference =
          sca::reference_eigenfunctions(model, order,
                                        sca::EigenMethod::automatic,
                                        &warnings);
      const std::vector<Eigen::VectorXd> dictionary =
          sca::default_dictionary(model, reference);
      Eigen::MatrixXd table(static_cast<Eigen::Index>(eps_grid.size()), 2);
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        const sca::KernelGraph graph = sca::build_kernel(cloud, eps_grid[e]);
        const sca::MarkovChain chain = sca::build_markov(graph);
        const sca::SpectralDecomposition dec = sca::decompose(
            chain, q, sca::EigenMethod::automatic, &warnings);
        const double loss = sca::estimate_loss(cloud, dec, model, reference,
                                               t, q, dictionary, &warnings);
        table(static_cast<Eigen::Index>(e), 0) = eps_grid[e];
        table(static_cast<Eigen::Index>(e), 1) = loss;
      }
      sca::write_csv(out, table);
      // The dictionary is finite: the reported loss bounds the operator
      // norm from below.
      extra["loss_is_lower_bound"] = true;
    }
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "oracle", config, seed, warnings, {out}, extra);
  }
};

// ---- subcommand: convergence-study ------------------------------------------

struct StudyCmd {
  std::string means_text = "-2,2";
  std::string sds_text = "1,1";
  std::string weights_text = "0.5,0.5";
  long n = 1000;
  int seeds = 50;
  std::string eps_grid_text = "0.02,0.03,0.05,0.1,0.3,1";
  int ell = 1;
  double reference_epsilon = 1e-3;
  long reference_grid = 4096;
  std::uint64_t seed = 0;
  std::string out;
  std::string mean_out;
  std::string manifest;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "convergence-study",
        "eigenvector error vs bandwidth against the quadrature reference");
    cmd->add_option("--means", means_text, "mixture means");
    cmd->add_option("--sds", sds_text, "mixture sds");
    cmd->add_option("--weights", weights_text, "mixture weights");
    cmd->add_option("--n", n, "sample size");
    cmd->add_option("--seeds", seeds, "independent sample draws");
    cmd->add_option("--eps-grid", eps_grid_text, "bandwidth grid");
    cmd->add_option("--ell", ell, "eigenvector index");
    cmd->add_option("--reference-epsilon", reference_epsilon,
                    "quadrature bandwidth of the reference");
    cmd->add_option("--reference-grid", reference_grid,
                    "quadrature grid size of the reference");
    cmd->add_option("--seed", seed, "base RNG seed");
    cmd->add_option("--out", out, "per-seed error CSV")->required();
    cmd->add_option("--mean-out", mean_out, "mean error CSV");
    cmd->add_option("--manifest", manifest, "manifest path");
    cmd->callback([this] { run(); });
  }

  void run() const {
    sca::EigenvectorErrorConfig config;
    config.means = sca::parse_double_list(means_text);
    config.sds = sca::parse_double_list(sds_text);
    config.weights = sca::parse_double_list(weights_text);
    config.n = n;
    config.seeds = seeds;
    config.epsilons = sca::parse_double_list(eps_grid_text);
    config.ell = ell;
    config.reference_epsilon = reference_epsilon;
    config.reference_grid = reference_grid;
    config.seed = seed;
    sca::Warnings warnings;
    const sca::EigenvectorErrorResult result =
        sca::eigenvector_error_curve(config, &warnings);

    std::vector<std::string> outputs{out};
    sca::write_csv(out, result.errors);
    if (!mean_out.empty()) {
      sca::write_csv(mean_out, result.mean_errors.transpose());
      outputs.push_back(mean_out);
    }
    json cfg{{"means", means_text}, {"sds", sds_text},
             {"weights", weights_text}, {"n", n}, {"seeds", seeds},
             {"eps_grid", eps_grid_text}, {"ell", ell},
             {"reference_epsilon", reference_epsilon},
             {"reference_grid", reference_grid}};
    json extra{{"failures", result.failures},
               {"mean_errors", std::vector<double>(
                                   result.mean_errors.data(),
                                   result.mean_errors.data() +
                                       result.mean_errors.size())}};
    const std::string mpath =
        manifest.empty() ? default_manifest_path(out) : manifest;
    write_manifest(mpath, "convergence-study", cfg, seed, warnings, outputs,
                   extra);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral connectivity analysis of kernel diffusion on point clouds.\n"
      "Exit codes: 0 success, 2 input parse error, 3 parameter error, "
      "4 numeric error,\n5 disconnected realizations under "
      "--fail-on-disconnected."};
  app.require_subcommand(1);

  GenerateCmd generate_cmd;
  EmbedCmd embed_cmd;
  ExtendCmd extend_cmd;
  DistanceCmd distance_cmd;
  SelectCmd select_cmd;
  NodalCmd nodal_cmd;
  SpiralCmd spiral_cmd;
  CoarseCmd coarse_cmd;
  OracleCmd oracle_cmd;
  StudyCmd study_cmd;

  generate_cmd.add(app);
  embed_cmd.add(app);
  extend_cmd.add(app);
  distance_cmd.add(app);
  select_cmd.add(app);
  nodal_cmd.add(app);
  spiral_cmd.add(app);
  coarse_cmd.add(app);
  oracle_cmd.add(app);
  study_cmd.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kExitParse;
  } catch (const DisconnectedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDisconnected;
  } catch (const sca::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const sca::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const sca::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
