// Copyright 2026 The dpiw Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpiw/cli/experiment.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/metrics/metrics.hpp"
#include "dpiw/postprocess/postprocess.hpp"
#include "dpiw/privacy/mechanisms.hpp"
#include "dpiw/ratio/classifier_weights.hpp"
#include "dpiw/ratio/logistic.hpp"
#include "dpiw/synthgen/distributions.hpp"

namespace dpiw::cli {

using nlohmann::ordered_json;

Scheme scheme_from_string(const std::string& s) {
  if (s == "none") return Scheme::kNone;
  if (s == "true") return Scheme::kTrue;
  if (s == "logreg") return Scheme::kLogReg;
  if (s == "beta_noised") return Scheme::kBetaNoised;
  if (s == "output_lapl") return Scheme::kOutputLaplace;
  if (s == "output_norm") return Scheme::kOutputGaussian;
  if (s == "priv_mlp") return Scheme::kPrivMlp;
  if (s == "discriminator") return Scheme::kDiscriminator;
  throw InputError("unknown weighting scheme '" + s + "'");
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kNone: return "none";
    case Scheme::kTrue: return "true";
    case Scheme::kLogReg: return "logreg";
    case Scheme::kBetaNoised: return "beta_noised";
    case Scheme::kOutputLaplace: return "output_lapl";
    case Scheme::kOutputGaussian: return "output_norm";
    case Scheme::kPrivMlp: return "priv_mlp";
    case Scheme::kDiscriminator: return "discriminator";
  }
  return "none";
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.preset = j.value("preset", cfg.preset);
  cfg.gamma = j.value("gamma", cfg.gamma);
  if (j.contains("dgp")) cfg.dgp_spec = j.at("dgp");
  if (j.contains("sdgp")) cfg.sdgp_spec = j.at("sdgp");
  cfg.real_csv = j.value("real_csv", cfg.real_csv);
  cfg.synth_csv = j.value("synth_csv", cfg.synth_csv);
  cfg.label_column = j.value("label_column", cfg.label_column);
  if (j.contains("bounds")) {
    for (const auto& b : j.at("bounds"))
      cfg.bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  }
  cfg.n = j.value("n", cfg.n);
  cfg.scheme = scheme_from_string(j.value("scheme", std::string("none")));
  cfg.discriminator_csv = j.value("discriminator_csv", cfg.discriminator_csv);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.delta = j.value("delta", cfg.delta);
  if (j.contains("sdgp_spend")) {
    cfg.sdgp_spend.epsilon = j.at("sdgp_spend").value("epsilon", 0.0);
    cfg.sdgp_spend.delta = j.at("sdgp_spend").value("delta", 0.0);
  }
  cfg.train_fraction = j.value("train_fraction", cfg.train_fraction);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.target_rho = j.value("target_rho", cfg.target_rho);
  if (j.contains("postprocess")) {
    const auto& pp = j.at("postprocess");
    cfg.temper_tau = pp.value("temper_tau", cfg.temper_tau);
    cfg.psis = pp.value("psis", cfg.psis);
    cfg.calibrate = pp.value("calibrate", cfg.calibrate);
  }
  if (j.contains("metrics")) cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
  cfg.mmd_bandwidth = j.value("mmd_bandwidth", cfg.mmd_bandwidth);
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("dpsgd")) {
    const auto& d = j.at("dpsgd");
    cfg.dpsgd.lot_size = d.value("lot_size", cfg.dpsgd.lot_size);
    cfg.dpsgd.clip_norm = d.value("clip_norm", cfg.dpsgd.clip_norm);
    cfg.dpsgd.noise_multiplier = d.value("noise_multiplier", cfg.dpsgd.noise_multiplier);
    cfg.dpsgd.steps = d.value("steps", cfg.dpsgd.steps);
    cfg.dpsgd.learning_rate = d.value("learning_rate", cfg.dpsgd.learning_rate);
    cfg.dpsgd.delta = d.value("delta", cfg.dpsgd.delta);
  }
  return cfg;
}

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["preset"] = preset;
  j["gamma"] = gamma;
  if (!dgp_spec.is_null()) j["dgp"] = dgp_spec;
  if (!sdgp_spec.is_null()) j["sdgp"] = sdgp_spec;
  j["real_csv"] = real_csv;
  j["synth_csv"] = synth_csv;
  j["label_column"] = label_column;
  auto jb = ordered_json::array();
  for (const auto& b : bounds) jb.push_back({b.lo, b.hi});
  j["bounds"] = jb;
  j["n"] = n;
  j["scheme"] = to_string(scheme);
  j["discriminator_csv"] = discriminator_csv;
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["sdgp_spend"] = {{"epsilon", sdgp_spend.epsilon}, {"delta", sdgp_spend.delta}};
  j["train_fraction"] = train_fraction;
  j["lambda"] = lambda;
  j["target_rho"] = target_rho;
  j["postprocess"] = {{"temper_tau", temper_tau}, {"psis", psis}, {"calibrate", calibrate}};
  j["metrics"] = metrics;
  j["mmd_bandwidth"] = mmd_bandwidth;
  j["seeds"] = seeds;
  j["dpsgd"] = {{"lot_size", dpsgd.lot_size},
                {"clip_norm", dpsgd.clip_norm},
                {"noise_multiplier", dpsgd.noise_multiplier},
                {"steps", dpsgd.steps},
                {"learning_rate", dpsgd.learning_rate},
                {"delta", dpsgd.delta}};
  return j;
}

namespace {

std::vector<FeatureBounds> default_bounds(const std::string& preset, std::size_t d) {
  if (preset == "gmm-grid") return std::vector<FeatureBounds>(d, {-2.5, 2.5});
  if (preset == "bayes-logistic") {
    std::vector<FeatureBounds> b(d, {-9.0, 9.0});
    return b;
  }
  throw InputError("bounds are required for CSV data");
}

struct SeedArtifacts {
  ordered_json record;
  std::vector<PrivacySpend> spends;
  bool pareto_warning = false;
};

bool wants(const std::vector<std::string>& metrics, const std::string& name) {
  for (const auto& m : metrics)
    if (m == name) return true;
  return false;
}

SeedArtifacts run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  RngStream rng(seed);
  SeedArtifacts out;
  out.record["seed"] = seed;

  // Data.
  std::optional<synthgen::GeneratorPair> generators;
  if (!cfg.dgp_spec.is_null() && !cfg.sdgp_spec.is_null()) {
    generators = synthgen::GeneratorPair{
        synthgen::Distribution::from_json(cfg.dgp_spec),
        synthgen::Distribution::from_json(cfg.sdgp_spec)};
  } else if (!cfg.preset.empty()) {
    generators = synthgen::preset(cfg.preset, cfg.gamma);
  }
  Dataset real = [&]() {
    if (generators)
      return synthgen::sample(*generators->dgp, cfg.n, rng.substream(0), Source::kPrivate);
    CsvOptions opts;
    opts.label_column = cfg.label_column;
    return read_csv(cfg.real_csv, Source::kPrivate, opts);
  }();

  auto [train, test] = train_test_split(real, cfg.train_fraction, rng.substream(1));
  const std::size_t n_train = train.rows();

  Dataset synth = [&]() {
    if (generators)
      return synthgen::sample(*generators->sdgp, n_train, rng.substream(2), Source::kSynthetic);
    CsvOptions opts;
    opts.label_column = cfg.label_column;
    return read_csv(cfg.synth_csv, Source::kSynthetic, opts);
  }();

  const auto bounds =
      cfg.bounds.empty() ? default_bounds(cfg.preset, real.cols()) : cfg.bounds;
  auto scaled_train = minmax_scale(train, bounds);
  auto scaled_test = minmax_scale(test, bounds);
  auto scaled_synth = minmax_scale(synth, bounds);
  out.record["clamped"] =
      scaled_train.clamped + scaled_test.clamped + scaled_synth.clamped;

  // Weighting scheme. Classifier schemes operate on scaled data; exact
  // generator weights use the original coordinates (the ratio is the same
  // either way only for bijective maps, and clamping is not one).
  WeightVector weights = WeightVector::uniform(synth.rows());
  Dataset used_synth = scaled_synth.data;
  std::optional<ratio::LogisticModel> ratio_model;

  const auto n_synth = synth.rows();
  switch (cfg.scheme) {
    case Scheme::kNone:
      break;
    case Scheme::kTrue: {
      if (!generators) throw InputError("scheme 'true' needs a generator preset");
      weights = synthgen::true_log_weights(*generators->dgp, *generators->sdgp, synth);
      break;
    }
    case Scheme::kLogReg: {
      ratio_model = ratio::fit_logistic_l2(scaled_train.data, scaled_synth.data, cfg.lambda);
      weights = ratio::log_weights_from_classifier(*ratio_model, scaled_synth.data, n_train,
                                                   n_synth);
      break;
    }
    case Scheme::kBetaNoised: {
      ratio_model = ratio::fit_logistic_l2(scaled_train.data, scaled_synth.data, cfg.lambda);
      const auto noised =
          privacy::beta_noised_model(*ratio_model, cfg.epsilon, rng.substream(3));
      weights =
          ratio::log_weights_from_classifier(noised, scaled_synth.data, n_train, n_synth);
      weights = WeightVector::from_log(
          weights.log_values(), Provenance::kBetaNoised,
          PrivacySpend{cfg.epsilon, 0.0, "coefficient-noised logistic ratio model"});
      break;
    }
    case Scheme::kOutputLaplace:
    case Scheme::kOutputGaussian: {
      ratio_model = ratio::fit_logistic_l2(scaled_train.data, scaled_synth.data, cfg.lambda);
      weights = ratio::log_weights_from_classifier(*ratio_model, scaled_synth.data, n_train,
                                                   n_synth);
      // Release count: a target noise scale bounds how many weights the
      // budget can carry; zero means the most that keeps variance finite.
      long releasable;
      if (cfg.target_rho > 0.0) {
        const double per =
            privacy::laplace_scale_rho(ratio_model->dim(), n_train, cfg.lambda, cfg.epsilon, 1);
        releasable = std::max(1L, static_cast<long>(std::floor(cfg.target_rho / per)));
      } else {
        releasable = privacy::max_releasable_weights(ratio_model->dim(), n_train, cfg.lambda,
                                                     cfg.epsilon, true);
      }
      const auto n_release = std::min<std::size_t>(static_cast<std::size_t>(releasable), n_synth);
      weights = weights.head(n_release);
      used_synth = scaled_synth.data.head(n_release);
      if (cfg.scheme == Scheme::kOutputLaplace) {
        const double rho = privacy::laplace_scale_rho(ratio_model->dim(), n_train, cfg.lambda,
                                                      cfg.epsilon, n_release);
        weights = privacy::privatize_weights_laplace(weights, rho, ratio_model->sensitivity(),
                                                     rng.substream(3));
        out.record["rho"] = rho;
      } else {
        const double gamma = privacy::gaussian_scale_gamma(
            ratio_model->dim(), n_train, cfg.lambda, cfg.epsilon, cfg.delta, n_release);
        weights = privacy::privatize_weights_gaussian(weights, gamma, ratio_model->sensitivity(),
                                                      cfg.delta, rng.substream(3));
        out.record["gamma"] = gamma;
      }
      break;
    }
    case Scheme::kPrivMlp: {
      const auto model =
          ratio::fit_mlp_dpsgd(scaled_train.data, scaled_synth.data, cfg.dpsgd, rng.substream(3));
      weights = ratio::log_weights_from_classifier(model, scaled_synth.data, n_train, n_synth);
      break;
    }
    case Scheme::kDiscriminator: {
      weights = ratio::import_external_probabilities(cfg.discriminator_csv, n_train, n_synth);
      if (weights.size() != n_synth)
        throw InputError("discriminator file row count does not match synthetic data");
      break;
    }
  }

  // Post-processing (pure, no budget).
  if (cfg.calibrate) {
    if (!ratio_model)
      throw InputError("calibration needs a probability-based scheme (logreg)");
    const std::size_t n_hold = scaled_test.data.rows();
    if (n_synth < n_hold) throw InputError("not enough synthetic rows for a calibration holdout");
    const auto hold_idx = metrics::subsample_rows(n_synth, n_hold, rng.substream(4));
    std::vector<double> probs;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n_hold; ++i) {
      probs.push_back(ratio_model->prob(scaled_test.data.row(i)));
      labels.push_back(1);
    }
    for (std::size_t i : hold_idx) {
      probs.push_back(ratio_model->prob(scaled_synth.data.row(i)));
      labels.push_back(0);
    }
    const auto map = postprocess::beta_calibrate(probs, labels);
    std::vector<double> lw(used_synth.rows());
    const double correction =
        std::log(static_cast<double>(n_train) / static_cast<double>(n_synth));
    for (std::size_t i = 0; i < used_synth.rows(); ++i)
      lw[i] = logit(map.apply(ratio_model->prob(used_synth.row(i)))) + correction;
    weights = weights.with_log_values(std::move(lw), Provenance::kCalibrated);
    out.record["calibration"] = {{"a", map.a}, {"b", map.b}, {"c", map.c}};
  }
  if (cfg.temper_tau < 1.0) weights = postprocess::temper(weights, cfg.temper_tau);
  if (cfg.psis) {
    const auto psis = postprocess::psis_smooth(weights);
    weights = psis.smoothed;
    out.record["psis"] = {
        {"k_hat", psis.k_hat}, {"sigma_hat", psis.sigma_hat}, {"warning", psis.warning}};
    out.pareto_warning = psis.warning;
  }

  out.record["weights"] = {{"provenance", to_string(weights.provenance())},
                           {"n", weights.size()},
                           {"infinite_variance", weights.infinite_variance_warning()}};

  // Ledger: external generator spend plus anything the scheme consumed.
  out.spends.push_back(cfg.sdgp_spend);
  if (weights.spend()) out.spends.push_back(*weights.spend());

  // Metrics against the held-out real data.
  ordered_json metrics_json;
  if (wants(cfg.metrics, "wasserstein")) {
    const auto w1 = metrics::weighted_wasserstein(used_synth, weights, scaled_test.data);
    metrics_json["wasserstein"] = w1.value;
    metrics_json["wasserstein_method"] = w1.method;
  }
  if (wants(cfg.metrics, "mmd")) {
    const std::size_t n_mmd = std::min(used_synth.rows(), scaled_test.data.rows());
    const auto si = metrics::subsample_rows(used_synth.rows(), n_mmd, rng.substream(5));
    const auto ri = metrics::subsample_rows(scaled_test.data.rows(), n_mmd, rng.substream(6));
    metrics_json["mmd2"] = metrics::weighted_mmd2(used_synth.select(si), weights.subset(si),
                                                  scaled_test.data.select(ri),
                                                  cfg.mmd_bandwidth);
  }
  if (wants(cfg.metrics, "auc")) {
    if (!used_synth.has_labels() || !scaled_test.data.has_labels())
      throw InputError("AUC requested but data has no labels");
    metrics_json["auc"] = metrics::downstream_auc(used_synth, weights, scaled_test.data);
  }
  out.record["metrics"] = metrics_json;
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw InputError("need at least one seed");
  const bool has_specs = !cfg.dgp_spec.is_null() && !cfg.sdgp_spec.is_null();
  if (cfg.preset.empty() && !has_specs && (cfg.real_csv.empty() || cfg.synth_csv.empty()))
    throw InputError("a preset, generator specs, or both CSV paths must be given");
  if (cfg.scheme != Scheme::kNone && cfg.scheme != Scheme::kTrue &&
      cfg.scheme != Scheme::kDiscriminator && !(cfg.epsilon > 0.0))
    throw InputError("private weighting schemes need a positive epsilon");

  ExperimentReport report;
  report.seeds_total = cfg.seeds.size();
  report.doc["config"] = cfg.to_json();

  auto per_seed = ordered_json::array();
  std::vector<PrivacySpend> ledger;
  auto warnings = ordered_json::array();

  // Aggregation accumulators keyed by metric name.
  std::vector<std::string> metric_names;
  std::vector<std::vector<double>> metric_values;
  auto record_value = [&](const std::string& name, double v) {
    for (std::size_t k = 0; k < metric_names.size(); ++k) {
      if (metric_names[k] == name) {
        metric_values[k].push_back(v);
        return;
      }
    }
    metric_names.push_back(name);
    metric_values.push_back({v});
  };

  for (const auto seed : cfg.seeds) {
    try {
      auto artifacts = run_seed(cfg, seed);
      for (const auto& [key, value] : artifacts.record.at("metrics").items())
        if (value.is_number()) record_value(key, value.get<double>());
      per_seed.push_back(artifacts.record);
      for (auto& s : artifacts.spends) ledger.push_back(std::move(s));
      if (artifacts.pareto_warning) {
        report.pareto_warning = true;
        warnings.push_back("pareto tail shape above 0.7 at seed " + std::to_string(seed));
      }
    } catch (const std::exception& e) {
      ++report.seeds_failed;
      ordered_json failure;
      failure["seed"] = seed;
      failure["error"] = e.what();
      per_seed.push_back(failure);
    }
  }

  report.doc["per_seed"] = per_seed;

  ordered_json aggregate;
  for (std::size_t k = 0; k < metric_names.size(); ++k) {
    const auto& vals = metric_values[k];
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    const double sd = vals.size() > 1 ? std::sqrt(var / static_cast<double>(vals.size() - 1)) : 0.0;
    const double half = 1.959963984540054 * sd / std::sqrt(static_cast<double>(vals.size()));
    aggregate[metric_names[k]] = {{"mean", mean}, {"ci95", {mean - half, mean + half}}};
  }
  report.doc["aggregate"] = aggregate;

  const auto total = compose_spends(ledger);
  report.doc["privacy_ledger"] = {{"epsilon", total.epsilon},
                                  {"delta", total.delta},
                                  {"mechanisms", total.mechanism}};
  report.doc["warnings"] = warnings;
  return report;
}

void write_release_csv(const WeightVector& w, const std::string& path, bool unsafe_release) {
  if (!w.releasable() && !unsafe_release)
    throw InputError(
        "refusing to write raw estimated weights: they are an unnoised function of the private "
        "data; privatize them first or pass --unsafe-release");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.precision(17);
  out << "index,log_weight,provenance,epsilon,delta\n";
  for (std::size_t i = 0; i < w.size(); ++i) {
    out << i << ',' << w.log_value(i) << ',' << to_string(w.provenance()) << ',';
    if (w.spend())
      out << w.spend()->epsilon << ',' << w.spend()->delta;
    else
      out << ',';
    out << '\n';
  }
}

WeightVector read_release_csv(const std::string& path, std::vector<std::size_t>* indices) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file '" + path + "'");

  std::vector<double> lw;
  std::optional<PrivacySpend> spend;
  std::string prov_str;
  std::size_t line_no = 1;
  if (indices) indices->clear();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string idx, logw, prov, eps, delta;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, logw, ',') ||
        !std::getline(ss, prov, ','))
      throw InputError("malformed release row", line_no);
    std::getline(ss, eps, ',');
    std::getline(ss, delta, ',');
    lw.push_back(std::stod(logw));
    if (indices) indices->push_back(std::stoul(idx));
    prov_str = prov;
    if (!eps.empty())
      spend = PrivacySpend{std::stod(eps), delta.empty() ? 0.0 : std::stod(delta),
                           "imported release file"};
  }
  if (lw.empty()) throw InputError("no weights in '" + path + "'");
  return WeightVector::from_log(std::move(lw), provenance_from_string(prov_str), spend);
}

std::string report_csv(const nlohmann::ordered_json& report_doc) {
  std::ostringstream out;
  out << "metric,mean,ci95_lo,ci95_hi\n";
  if (report_doc.contains("aggregate")) {
    for (const auto& [name, entry] : report_doc.at("aggregate").items()) {
      out << name << ',' << entry.at("mean").get<double>() << ','
          << entry.at("ci95").at(0).get<double>() << ',' << entry.at("ci95").at(1).get<double>()
          << '\n';
    }
  }
  return out.str();
}

}  // namespace dpiw::cli
