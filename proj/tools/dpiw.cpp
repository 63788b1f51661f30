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

// Command-line harness around the weighting pipeline. Subcommands:
//   weigh       fit + privatize + release weights for real/synthetic CSVs
//   evaluate    metrics for a synthetic dataset with released weights
//   demo-gmm    seeded grid-mixture experiment with a chosen scheme
//   bayes       seeded weighted-posterior experiment on the labelled preset
//   accountant  composition arithmetic for noisy SGD or a spend list
// Exit codes: 0 ok, 2 configuration error, 3 every seed failed; the 0x10
// bit is set when --fail-on-pareto-warning is given and a tail warning
// fired.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dpiw/cli/experiment.hpp"
#include "dpiw/core/error.hpp"
#include "dpiw/metrics/metrics.hpp"
#include "dpiw/postprocess/postprocess.hpp"
#include "dpiw/privacy/accountant.hpp"
#include "dpiw/privacy/mechanisms.hpp"
#include "dpiw/ratio/classifier_weights.hpp"
#include "dpiw/ratio/logistic.hpp"
#include "dpiw/bayes/bayes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAllSeedsFailed = 3;
constexpr int kParetoBit = 0x10;

using dpiw::cli::ExperimentConfig;
using nlohmann::ordered_json;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dpiw::InputError("cannot open config '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

void emit(const ordered_json& doc, const std::string& out_path, const std::string& csv_path) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw dpiw::InputError("cannot write '" + out_path + "'");
    out << text;
  }
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw dpiw::InputError("cannot write '" + csv_path + "'");
    out << dpiw::cli::report_csv(doc);
  }
}

struct CommonFlags {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  double epsilon = -1.0;
  double delta = -1.0;
  std::string scheme;
  std::string out;
  std::string csv;
  bool fail_on_pareto = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file");
    app->add_option("--seed", seeds, "seed list")->delimiter(',');
    app->add_option("--epsilon", epsilon, "weight-mechanism budget");
    app->add_option("--delta", delta, "delta for (epsilon, delta) mechanisms");
    app->add_option("--scheme", scheme, "weighting scheme");
    app->add_option("--out", out, "report JSON path (stdout otherwise)");
    app->add_option("--csv", csv, "flat metric table path");
    app->add_flag("--fail-on-pareto-warning", fail_on_pareto,
                  "set exit bit 0x10 when the tail diagnostic warns");
  }

  ExperimentConfig build(const std::string& default_preset) const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::from_json(load_json(config_path));
    if (cfg.preset.empty() && cfg.real_csv.empty()) cfg.preset = default_preset;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (epsilon >= 0.0) cfg.epsilon = epsilon;
    if (delta >= 0.0) cfg.delta = delta;
    if (!scheme.empty()) cfg.scheme = dpiw::cli::scheme_from_string(scheme);
    return cfg;
  }
};

int run_demo(const CommonFlags& flags) {
  const auto cfg = flags.build("gmm-grid");
  const auto report = dpiw::cli::run_experiment(cfg);
  emit(report.doc, flags.out, flags.csv);
  if (report.all_failed()) return kExitAllSeedsFailed;
  int code = kExitOk;
  if (flags.fail_on_pareto && report.pareto_warning) code |= kParetoBit;
  return code;
}

int run_weigh(const CommonFlags& flags, const std::string& real_csv,
              const std::string& synth_csv, const std::string& label_column,
              const std::string& weights_out, bool unsafe_release) {
  auto cfg = flags.build("");
  cfg.preset.clear();
  if (!real_csv.empty()) cfg.real_csv = real_csv;
  if (!synth_csv.empty()) cfg.synth_csv = synth_csv;
  if (!label_column.empty()) cfg.label_column = label_column;
  if (cfg.real_csv.empty() || cfg.synth_csv.empty())
    throw dpiw::InputError("weigh needs --real and --synth CSVs");
  if (cfg.bounds.empty()) throw dpiw::InputError("weigh needs feature bounds in the config");

  dpiw::CsvOptions opts;
  opts.label_column = cfg.label_column;
  const auto real = dpiw::read_csv(cfg.real_csv, dpiw::Source::kPrivate, opts);
  const auto synth = dpiw::read_csv(cfg.synth_csv, dpiw::Source::kSynthetic, opts);
  const auto scaled_real = dpiw::minmax_scale(real, cfg.bounds);
  const auto scaled_synth = dpiw::minmax_scale(synth, cfg.bounds);

  dpiw::RngStream rng(cfg.seeds.empty() ? 1 : cfg.seeds.front());
  dpiw::WeightVector weights = dpiw::WeightVector::uniform(synth.rows());
  ordered_json info;
  using dpiw::cli::Scheme;
  switch (cfg.scheme) {
    case Scheme::kNone:
      break;
    case Scheme::kLogReg: {
      const auto model =
          dpiw::ratio::fit_logistic_l2(scaled_real.data, scaled_synth.data, cfg.lambda);
      weights = dpiw::ratio::log_weights_from_classifier(model, scaled_synth.data, real.rows(),
                                                         synth.rows());
      break;
    }
    case Scheme::kBetaNoised: {
      const auto model =
          dpiw::ratio::fit_logistic_l2(scaled_real.data, scaled_synth.data, cfg.lambda);
      const auto noised = dpiw::privacy::beta_noised_model(model, cfg.epsilon, rng.substream(1));
      auto w = dpiw::ratio::log_weights_from_classifier(noised, scaled_synth.data, real.rows(),
                                                        synth.rows());
      weights = dpiw::WeightVector::from_log(
          w.log_values(), dpiw::Provenance::kBetaNoised,
          dpiw::PrivacySpend{cfg.epsilon, 0.0, "coefficient-noised logistic ratio model"});
      break;
    }
    case Scheme::kOutputLaplace:
    case Scheme::kOutputGaussian: {
      const auto model =
          dpiw::ratio::fit_logistic_l2(scaled_real.data, scaled_synth.data, cfg.lambda);
      auto w = dpiw::ratio::log_weights_from_classifier(model, scaled_synth.data, real.rows(),
                                                        synth.rows());
      const long n_max = dpiw::privacy::max_releasable_weights(model.dim(), real.rows(),
                                                               cfg.lambda, cfg.epsilon, true);
      const auto n_release = std::min<std::size_t>(static_cast<std::size_t>(n_max), w.size());
      w = w.head(n_release);
      if (cfg.scheme == Scheme::kOutputLaplace) {
        const double rho = dpiw::privacy::laplace_scale_rho(model.dim(), real.rows(), cfg.lambda,
                                                            cfg.epsilon, n_release);
        weights = dpiw::privacy::privatize_weights_laplace(w, rho, model.sensitivity(),
                                                           rng.substream(1));
        info["rho"] = rho;
      } else {
        const double gamma = dpiw::privacy::gaussian_scale_gamma(
            model.dim(), real.rows(), cfg.lambda, cfg.epsilon, cfg.delta, n_release);
        weights = dpiw::privacy::privatize_weights_gaussian(w, gamma, model.sensitivity(),
                                                            cfg.delta, rng.substream(1));
        info["gamma"] = gamma;
      }
      info["n_release"] = n_release;
      break;
    }
    case Scheme::kPrivMlp: {
      const auto model = dpiw::ratio::fit_mlp_dpsgd(scaled_real.data, scaled_synth.data,
                                                    cfg.dpsgd, rng.substream(1));
      weights = dpiw::ratio::log_weights_from_classifier(model, scaled_synth.data, real.rows(),
                                                         synth.rows());
      break;
    }
    case Scheme::kDiscriminator: {
      weights = dpiw::ratio::import_external_probabilities(cfg.discriminator_csv, real.rows(),
                                                           synth.rows());
      break;
    }
    case Scheme::kTrue:
      throw dpiw::InputError("scheme 'true' needs generator presets, not CSV data");
  }

  dpiw::cli::write_release_csv(weights, weights_out, unsafe_release);
  info["weights_file"] = weights_out;
  info["provenance"] = dpiw::to_string(weights.provenance());
  if (weights.spend()) {
    info["epsilon"] = weights.spend()->epsilon;
    info["delta"] = weights.spend()->delta;
  }
  emit(info, flags.out, "");
  return kExitOk;
}

int run_evaluate(const CommonFlags& flags, const std::string& real_csv,
                 const std::string& synth_csv, const std::string& weights_csv,
                 const std::string& label_column, bool psis) {
  auto cfg = flags.build("");
  cfg.psis = cfg.psis || psis;
  dpiw::CsvOptions opts;
  opts.label_column = label_column.empty() ? cfg.label_column : label_column;
  if (cfg.bounds.empty()) throw dpiw::InputError("evaluate needs feature bounds in the config");
  const auto real = dpiw::read_csv(real_csv, dpiw::Source::kPrivate, opts);
  auto synth = dpiw::read_csv(synth_csv, dpiw::Source::kSynthetic, opts);
  auto weights = dpiw::WeightVector::uniform(synth.rows());
  if (!weights_csv.empty()) {
    std::vector<std::size_t> indices;
    weights = dpiw::cli::read_release_csv(weights_csv, &indices);
    if (weights.size() != synth.rows()) {
      // A subset release: evaluate on the released rows only.
      for (std::size_t i : indices)
        if (i >= synth.rows())
          throw dpiw::InputError("release index out of range of the synthetic data");
      synth = synth.select(indices);
    }
  }

  const auto scaled_real = dpiw::minmax_scale(real, cfg.bounds);
  const auto scaled_synth = dpiw::minmax_scale(synth, cfg.bounds);

  dpiw::RngStream rng(cfg.seeds.empty() ? 1 : cfg.seeds.front());
  ordered_json doc;
  bool pareto = false;
  if (cfg.psis) {
    const auto psis = dpiw::postprocess::psis_smooth(weights);
    weights = psis.smoothed;
    doc["psis"] = {{"k_hat", psis.k_hat}, {"warning", psis.warning}};
    pareto = psis.warning;
  }
  ordered_json metrics_json;
  const auto w1 = dpiw::metrics::weighted_wasserstein(scaled_synth.data, weights,
                                                      scaled_real.data);
  metrics_json["wasserstein"] = w1.value;
  metrics_json["wasserstein_method"] = w1.method;
  const std::size_t n_mmd = std::min(scaled_synth.data.rows(), scaled_real.data.rows());
  const auto si = dpiw::metrics::subsample_rows(scaled_synth.data.rows(), n_mmd, rng.substream(1));
  const auto ri = dpiw::metrics::subsample_rows(scaled_real.data.rows(), n_mmd, rng.substream(2));
  metrics_json["mmd2"] = dpiw::metrics::weighted_mmd2(
      scaled_synth.data.select(si), weights.subset(si), scaled_real.data.select(ri),
      cfg.mmd_bandwidth);
  if (real.has_labels() && synth.has_labels())
    metrics_json["auc"] =
        dpiw::metrics::downstream_auc(scaled_synth.data, weights, scaled_real.data);
  doc["metrics"] = metrics_json;
  if (weights.spend())
    doc["privacy_ledger"] = {{"epsilon", weights.spend()->epsilon},
                             {"delta", weights.spend()->delta}};
  emit(doc, flags.out, flags.csv);
  int code = kExitOk;
  if (flags.fail_on_pareto && pareto) code |= kParetoBit;
  return code;
}

int run_bayes(const CommonFlags& flags, double gamma, std::size_t n, std::size_t n_seeds) {
  auto cfg = flags.build("bayes-logistic");
  dpiw::bayes::BayesExperimentConfig bcfg;
  bcfg.gamma = gamma;
  bcfg.n = n;
  bcfg.seeds = flags.seeds.empty() ? n_seeds : flags.seeds.size();
  bcfg.epsilon = cfg.epsilon;
  bcfg.lambda = cfg.lambda;
  using dpiw::cli::Scheme;
  switch (cfg.scheme) {
    case Scheme::kNone: bcfg.scheme = dpiw::bayes::WeightScheme::kNone; break;
    case Scheme::kTrue: bcfg.scheme = dpiw::bayes::WeightScheme::kTrue; break;
    case Scheme::kLogReg: bcfg.scheme = dpiw::bayes::WeightScheme::kLogReg; break;
    case Scheme::kOutputLaplace:
      bcfg.scheme = dpiw::bayes::WeightScheme::kOutputLaplace;
      break;
    default:
      throw dpiw::InputError("bayes supports schemes none, true, logreg, output_lapl");
  }

  const auto rows = dpiw::bayes::bayes_logistic_experiment(
      bcfg, dpiw::RngStream(flags.seeds.empty() ? 1 : flags.seeds.front()));

  ordered_json doc;
  doc["config"] = {{"gamma", bcfg.gamma},
                   {"n", bcfg.n},
                   {"seeds", bcfg.seeds},
                   {"scheme", dpiw::cli::to_string(cfg.scheme)},
                   {"epsilon", bcfg.epsilon}};
  auto per_seed = ordered_json::array();
  double mse_mean = 0.0, maha_mean = 0.0;
  for (const auto& row : rows) {
    per_seed.push_back({{"seed", row.seed},
                        {"mse", row.mse_to_generating},
                        {"mahalanobis", row.mahalanobis_private},
                        {"posterior_trace_var", row.posterior_trace_var},
                        {"converged", row.converged},
                        {"n_used", row.n_used}});
    mse_mean += row.mse_to_generating;
    maha_mean += row.mahalanobis_private;
  }
  doc["per_seed"] = per_seed;
  doc["aggregate"] = {{"mse_mean", mse_mean / static_cast<double>(rows.size())},
                      {"mahalanobis_mean", maha_mean / static_cast<double>(rows.size())}};
  emit(doc, flags.out, flags.csv);
  return kExitOk;
}

int run_accountant(const CommonFlags& flags, std::size_t n_private, std::size_t n_synth,
                   const std::vector<double>& compose_pairs) {
  ordered_json doc;
  if (!compose_pairs.empty()) {
    if (compose_pairs.size() % 2 != 0)
      throw dpiw::InputError("--compose needs epsilon,delta pairs");
    std::vector<dpiw::PrivacySpend> ledger;
    for (std::size_t i = 0; i < compose_pairs.size(); i += 2)
      ledger.push_back({compose_pairs[i], compose_pairs[i + 1], "item"});
    const auto total = dpiw::compose_spends(ledger);
    doc["composed"] = {{"epsilon", total.epsilon}, {"delta", total.delta}};
  } else {
    const auto cfg = flags.build("");
    const auto report = dpiw::privacy::dp_sgd_privacy(cfg.dpsgd, n_private, n_synth);
    doc["epsilon_step"] = report.epsilon_step;
    doc["q"] = report.q;
    doc["basic"] = {{"epsilon", report.basic.epsilon}, {"delta", report.basic.delta}};
    doc["advanced"] = {{"epsilon", report.advanced.epsilon}, {"delta", report.advanced.delta}};
    doc["chosen"] = {{"epsilon", report.chosen.epsilon}, {"delta", report.chosen.delta}};
  }
  emit(doc, flags.out, "");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private importance weighting for synthetic data"};
  app.require_subcommand(1);

  CommonFlags demo_flags, weigh_flags, eval_flags, bayes_flags, acct_flags;

  auto* demo = app.add_subcommand("demo-gmm", "seeded grid-mixture experiment");
  demo_flags.attach(demo);

  auto* weigh = app.add_subcommand("weigh", "fit, privatize and release weights");
  weigh_flags.attach(weigh);
  std::string weigh_real, weigh_synth, weigh_label, weigh_out = "weights.csv";
  bool unsafe_release = false;
  weigh->add_option("--real", weigh_real, "private dataset CSV");
  weigh->add_option("--synth", weigh_synth, "synthetic dataset CSV");
  weigh->add_option("--label-column", weigh_label, "label column name");
  weigh->add_option("--weights-out", weigh_out, "release file path");
  weigh->add_flag("--unsafe-release", unsafe_release,
                  "allow writing raw (unprivatized) weight estimates");

  auto* eval = app.add_subcommand("evaluate", "metrics for data plus released weights");
  eval_flags.attach(eval);
  std::string eval_real, eval_synth, eval_weights, eval_label;
  eval->add_option("--real", eval_real, "private dataset CSV")->required();
  eval->add_option("--synth", eval_synth, "synthetic dataset CSV")->required();
  eval->add_option("--weights", eval_weights, "release file (uniform if omitted)");
  eval->add_option("--label-column", eval_label, "label column name");
  bool eval_psis = false;
  eval->add_flag("--psis", eval_psis, "smooth the weight tail before evaluating");

  auto* bayes = app.add_subcommand("bayes", "weighted-posterior experiment");
  bayes_flags.attach(bayes);
  double bayes_gamma = 1.0;
  std::size_t bayes_n = 2000, bayes_seeds = 40;
  bayes->add_option("--gamma", bayes_gamma, "mixture share of the far component");
  bayes->add_option("--n", bayes_n, "observations per seed");
  bayes->add_option("--n-seeds", bayes_seeds, "number of seeds");

  auto* acct = app.add_subcommand("accountant", "privacy composition arithmetic");
  acct_flags.attach(acct);
  std::size_t acct_priv = 0, acct_synth = 0;
  std::vector<double> acct_compose;
  acct->add_option("--n-private", acct_priv, "private example count");
  acct->add_option("--n-synth", acct_synth, "synthetic example count");
  acct->add_option("--compose", acct_compose, "epsilon,delta pairs to compose")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (demo->parsed()) return run_demo(demo_flags);
    if (weigh->parsed())
      return run_weigh(weigh_flags, weigh_real, weigh_synth, weigh_label, weigh_out,
                       unsafe_release);
    if (eval->parsed())
      return run_evaluate(eval_flags, eval_real, eval_synth, eval_weights, eval_label,
                          eval_psis);
    if (bayes->parsed()) return run_bayes(bayes_flags, bayes_gamma, bayes_n, bayes_seeds);
    if (acct->parsed()) return run_accountant(acct_flags, acct_priv, acct_synth, acct_compose);
  } catch (const dpiw::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
