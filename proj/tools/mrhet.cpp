// Command-line front end: analyze summary datasets with any of the outlier
// detectors, or run seeded simulation benchmarks that mirror the library's
// preset settings. All randomized commands take a seed and echo it in the
// run manifest; identical seeds reproduce output files byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mrhet/gcq.hpp"
#include "mrhet/heterogeneity.hpp"
#include "mrhet/ivw.hpp"
#include "mrhet/median_mr.hpp"
#include "mrhet/presets.hpp"
#include "mrhet/presso.hpp"
#include "mrhet/radial.hpp"
#include "mrhet/simulation.hpp"
#include "mrhet/summary_data.hpp"
#include "mrhet/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char chunk[4096];
  while (in.read(chunk, sizeof(chunk)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(chunk[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

struct CsvFile {
  explicit CsvFile(const fs::path& path) : out(path, std::ios::binary) {
    if (!out) throw mrhet::ValidationError("FileNotFound", "cannot write " + path.string());
    out << "# manifest: manifest.json\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
  std::ofstream out;
};

int env_threads() {
  if (const char* env = std::getenv("MR_HETERO_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeArgs {
  std::string data_path;
  int exposures = 1;
  std::string cov_path;
  std::string method = "all";
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string radial_weights = "second";
  std::string second_order_variant = "delta";
  bool median_simple = false;
  int presso_sims = 1000;
  int median_bootstrap = 1000;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const std::set<std::string> known = {"full", "standard", "sanderson", "presso", "radial", "gcq", "median", "all"};
  if (!known.count(args.method)) throw mrhet::InvalidArgument("unknown method '" + args.method + "'");
  if (args.radial_weights != "first" && args.radial_weights != "second")
    throw mrhet::InvalidArgument("--radial-weights must be 'first' or 'second'");
  if (args.second_order_variant != "delta" && args.second_order_variant != "beta-scaled")
    throw mrhet::InvalidArgument("--second-order-variant must be 'delta' or 'beta-scaled'");
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw mrhet::InvalidP("alpha must be in (0,1)");
  const auto so_variant = args.second_order_variant == "delta" ? mrhet::SecondOrderVariant::Delta
                                                               : mrhet::SecondOrderVariant::BetaScaled;

  mrhet::SummaryDataset data = mrhet::load_dataset(args.data_path, args.exposures);
  if (!args.cov_path.empty()) data = mrhet::with_exposure_cov(data, args.cov_path);

  const bool all = args.method == "all";
  const auto want = [&](const char* m) { return all || args.method == m; };
  const bool univariable = data.n_exposures() == 1;

  fs::create_directories(args.out_dir);
  CsvFile estimates(fs::path(args.out_dir) / "estimates.csv");
  estimates.row({"method", "exposure", "theta", "se", "p_value"});
  CsvFile outliers(fs::path(args.out_dir) / "outliers.csv");
  outliers.row({"method", "snp", "q", "p_value", "flagged"});

  json details;
  std::vector<std::string> outputs = {"estimates.csv", "outliers.csv"};

  const auto emit_estimate = [&](const std::string& label, const mrhet::CausalEstimate& est) {
    for (int j = 0; j < est.theta.size(); ++j)
      estimates.row({label, std::to_string(j + 1), fmt(est.theta(j)), fmt(est.se(j)), fmt(est.p_values(j))});
  };
  const auto emit_outliers = [&](const std::string& label, const std::vector<std::string>& ids,
                                 const std::vector<double>& stat, const std::vector<double>& pvals,
                                 const std::set<std::string>& flagged) {
    for (std::size_t i = 0; i < ids.size(); ++i)
      outliers.row({label, ids[i], fmt(stat[i]), fmt(pvals[i]), flagged.count(ids[i]) ? "1" : "0"});
  };

  if (want("full")) {
    const auto est = mrhet::ivw_multivariable(data);
    emit_estimate("full", est);
    details["full"] = {{"n_snps_used", est.n_snps_used}};
  }
  if (want("standard")) {
    const auto h = mrhet::cochran_q(data, mrhet::WeightScheme::first_order());
    const auto t = mrhet::local_q_pvalues(h, args.alpha);
    const auto refit = t.flagged.empty() ? mrhet::ivw_multivariable(data)
                                         : mrhet::ivw_multivariable(mrhet::drop_snps(data, t.flagged));
    emit_estimate("standard", refit);
    emit_outliers("standard", h.snp_ids, h.local_q, t.p_values, t.flagged);
    details["standard"] = {{"global_q", h.global_q},       {"df", h.df},
                           {"global_p", h.p_value},        {"alpha_star", t.alpha_star},
                           {"critical_value", t.critical_value}, {"n_flagged", t.flagged.size()}};
  }
  if (want("sanderson")) {
    const auto h = mrhet::cochran_q(data, mrhet::WeightScheme::second_order(1e-8, 100, so_variant));
    const auto t = mrhet::local_q_pvalues(h, args.alpha);
    const auto refit = t.flagged.empty() ? mrhet::ivw_multivariable(data)
                                         : mrhet::ivw_multivariable(mrhet::drop_snps(data, t.flagged));
    emit_estimate("sanderson", refit);
    emit_outliers("sanderson", h.snp_ids, h.local_q, t.p_values, t.flagged);
    details["sanderson"] = {{"global_q", h.global_q},
                            {"df", h.df},
                            {"global_p", h.p_value},
                            {"alpha_star", t.alpha_star},
                            {"critical_value", t.critical_value},
                            {"converged", h.converged},
                            {"iterations", h.iterations},
                            {"second_order_variant", args.second_order_variant},
                            {"exposure_covariances_assumed_zero", h.covariances_assumed_zero},
                            {"n_flagged", t.flagged.size()}};
  }
  if (want("presso")) {
    mrhet::PressoConfig pc;
    pc.n_simulations = args.presso_sims;
    pc.seed = args.seed;
    pc.alpha = args.alpha;
    if (1.0 / (1.0 + pc.n_simulations) >= pc.alpha / data.n())
      std::cerr << "warning: presso needs more than n/alpha = " << static_cast<int>(data.n() / pc.alpha)
                << " simulations for the add-one empirical p to reach the Bonferroni threshold; "
                   "no variant can be flagged at --presso-sims "
                << pc.n_simulations << '\n';
    const auto global = mrhet::presso_global(data, pc);
    const auto report = mrhet::presso_outlier_test(data, pc);
    emit_estimate("presso", report.refit);
    std::vector<double> stat, pv;
    for (const auto& id : data.snp_ids()) {
      stat.push_back(report.per_snp_stat.at(id));
      pv.push_back(report.per_snp_p.at(id));
    }
    emit_outliers("presso", data.snp_ids(), stat, pv, report.flagged);
    details["presso"] = {{"rss_observed", global.rss_observed},
                         {"global_p", global.p_value},
                         {"n_simulations", pc.n_simulations},
                         {"threshold", report.threshold_description},
                         {"n_flagged", report.flagged.size()}};
  }
  if (want("radial")) {
    if (!univariable) {
      if (!all) throw mrhet::InvalidArgument("radial requires --exposures 1");
    } else {
      const auto scheme = args.radial_weights == "first" ? mrhet::WeightScheme::first_order()
                                                         : mrhet::WeightScheme::second_order();
      const auto r = mrhet::radial_mr(data, scheme, args.alpha);
      emit_estimate("radial", r.report.refit);
      std::vector<double> stat, pv;
      std::vector<std::string> ids;
      for (const auto& pt : r.points) {
        ids.push_back(pt.snp_id);
        stat.push_back(pt.q);
        pv.push_back(r.report.per_snp_p.at(pt.snp_id));
      }
      emit_outliers("radial", ids, stat, pv, r.report.flagged);
      CsvFile plot(fs::path(args.out_dir) / "radial_plot.csv");
      plot.row({"snp", "z_stat", "precision", "q", "flagged"});
      for (const auto& pt : r.points)
        plot.row({pt.snp_id, fmt(pt.z_stat), fmt(pt.precision), fmt(pt.q), pt.flagged ? "1" : "0"});
      outputs.push_back("radial_plot.csv");
      details["radial"] = {{"theta_radial", r.theta_radial},
                           {"weights", args.radial_weights},
                           {"threshold", r.report.threshold_description},
                           {"n_flagged", r.report.flagged.size()}};
    }
  }
  if (want("gcq")) {
    mrhet::GcqOptions go;
    go.alpha = args.alpha;
    const auto g = mrhet::detect_outliers_gcq(data, go);
    emit_estimate("gcq", g.refit);
    emit_outliers("gcq", g.snp_ids, g.adjusted_q, g.p_values, g.flagged);
    details["gcq"] = {{"lambda_hat", g.lambda_hat},
                      {"alpha", g.alpha},
                      {"alpha_star", g.alpha_star},
                      {"critical_value", g.critical_value},
                      {"degenerate_lambda", g.degenerate_lambda},
                      {"n_flagged", g.flagged.size()},
                      {"exposure_covariances_assumed_zero", !data.has_exposure_cov() && data.n_exposures() > 1}};
  }
  if (want("median")) {
    if (!univariable) {
      if (!all) throw mrhet::InvalidArgument("median requires --exposures 1");
    } else {
      const auto est = mrhet::median_estimator(data, !args.median_simple, args.median_bootstrap, args.seed);
      emit_estimate("median", est);
      details["median"] = {{"weighted", !args.median_simple}, {"n_bootstrap", args.median_bootstrap}};
    }
  }

  json manifest = {{"tool", "mrhet"},
                   {"version", mrhet::kVersion},
                   {"command", "analyze"},
                   {"created", timestamp_utc()},
                   {"seed", args.seed},
                   {"alpha", args.alpha},
                   {"method", args.method},
                   {"inputs",
                    json::array({{{"path", args.data_path}, {"digest", file_digest(args.data_path)}}})},
                   {"n_snps", data.n()},
                   {"n_exposures", data.n_exposures()},
                   {"exposure_covariances", data.has_exposure_cov() ? "file" : "assumed zero"},
                   {"outputs", outputs},
                   {"details", details}};
  if (!args.cov_path.empty())
    manifest["inputs"].push_back({{"path", args.cov_path}, {"digest", file_digest(args.cov_path)}});
  std::ofstream mf(fs::path(args.out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';

  std::cout << "analyze: wrote " << args.out_dir << " (n=" << data.n() << ", d=" << data.n_exposures()
            << ", seed=" << args.seed << ")\n";
  return 0;
}

// --------------------------------------------------------------- simulate --

struct SimulateArgs {
  std::string preset;
  std::string config_path;
  int runs = -1;
  int individuals = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  bool quick = false;
  int threads = 0;
  std::string methods_override;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Flat "key = value" configuration files; '#' starts a comment.
void apply_config_file(mrhet::SimConfig& cfg, std::vector<mrhet::Method>& methods, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw mrhet::ValidationError("FileNotFound", "cannot open config " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw mrhet::ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto as_double = [&] { return mrhet::detail::parse_double(value, "config key " + key); };
    const auto as_int = [&] { return static_cast<int>(as_double()); };
    const auto as_bool = [&] {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      throw mrhet::ParseError("config key " + key + ": expected true/false");
    };
    if (key == "n_individuals") cfg.n_individuals = as_int();
    else if (key == "n_snps") cfg.n_snps = as_int();
    else if (key == "n_exposures") cfg.n_exposures = as_int();
    else if (key == "outlier_fraction") cfg.outlier_fraction = as_double();
    else if (key == "pleiotropy_mode") {
      if (value == "directional") cfg.pleiotropy_mode = mrhet::PleiotropyMode::Directional;
      else if (value == "balanced") cfg.pleiotropy_mode = mrhet::PleiotropyMode::Balanced;
      else throw mrhet::ParseError("config key pleiotropy_mode: expected directional|balanced");
    } else if (key == "outlier_dist") {
      if (value == "uniform") cfg.outlier_effect_dist.kind = mrhet::OutlierEffectDist::Kind::Uniform;
      else if (value == "normal") cfg.outlier_effect_dist.kind = mrhet::OutlierEffectDist::Kind::Normal;
      else throw mrhet::ParseError("config key outlier_dist: expected uniform|normal");
    } else if (key == "outlier_param1") cfg.outlier_effect_dist.param1 = as_double();
    else if (key == "outlier_param2") cfg.outlier_effect_dist.param2 = as_double();
    else if (key == "r2_first_stage") cfg.r2_first_stage = as_double();
    else if (key == "r2_second_stage") cfg.r2_second_stage = as_double();
    else if (key == "confounder_r2") cfg.confounder_r2 = as_double();
    else if (key == "causal_effects") {
      cfg.causal_effects.clear();
      for (const auto& tok : split_list(value))
        cfg.causal_effects.push_back(mrhet::detail::parse_double(tok, "config key causal_effects"));
    } else if (key == "pleiotropy_effect") cfg.pleiotropy_effect = as_double();
    else if (key == "exposure_error_correlation") cfg.exposure_error_correlation = as_double();
    else if (key == "first_stage_coef_mean") cfg.first_stage_coef_mean = as_double();
    else if (key == "first_stage_coef_variance") cfg.first_stage_coef_variance = as_double();
    else if (key == "n_runs") cfg.n_runs = as_int();
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_double());
    else if (key == "two_sample_split") cfg.two_sample_split = as_bool();
    else if (key == "methods") {
      methods.clear();
      for (const auto& tok : split_list(value)) {
        const auto m = mrhet::method_from_name(tok);
        if (!m) throw mrhet::ParseError("config key methods: unknown method '" + tok + "'");
        methods.push_back(*m);
      }
    } else {
      throw mrhet::ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

int cmd_simulate(const SimulateArgs& args) {
  if (args.preset.empty() == args.config_path.empty())
    throw mrhet::InvalidArgument("exactly one of --preset or --config is required");

  mrhet::SimConfig cfg;
  std::vector<mrhet::Method> methods;
  std::string setting;
  if (!args.preset.empty()) {
    const auto p = mrhet::preset_config(args.preset);
    if (!p) throw mrhet::InvalidArgument("unknown preset '" + args.preset + "'");
    cfg = *p;
    methods = mrhet::preset_methods(cfg);
    setting = args.preset;
  } else {
    cfg = *mrhet::preset_config("uni10");  // config files override from a complete base
    methods.clear();
    apply_config_file(cfg, methods, args.config_path);
    if (methods.empty()) methods = mrhet::preset_methods(cfg);
    setting = fs::path(args.config_path).stem().string();
  }
  if (!args.methods_override.empty()) {
    methods.clear();
    for (const auto& tok : split_list(args.methods_override)) {
      const auto m = mrhet::method_from_name(tok);
      if (!m) throw mrhet::InvalidArgument("unknown method '" + tok + "'");
      methods.push_back(*m);
    }
  }
  if (args.runs > 0) cfg.n_runs = args.runs;
  if (args.individuals > 0) cfg.n_individuals = args.individuals;
  if (args.seed_given) cfg.seed = args.seed;

  mrhet::BenchmarkOptions opt;
  if (args.quick) {
    cfg.n_runs = std::min(cfg.n_runs, 16);
    cfg.n_individuals = std::min(cfg.n_individuals, 4000);
    opt.presso_simulations = 200;
    opt.median_bootstrap = 200;
  }
  const int threads = args.threads > 0 ? args.threads : env_threads();
  cfg.validate();

  const auto metrics = mrhet::run_benchmark(cfg, methods, threads, opt);

  fs::create_directories(args.out_dir);
  CsvFile csv(fs::path(args.out_dir) / "metrics.csv");
  std::vector<std::string> header = {"measure"};
  for (const auto m : methods) header.push_back(mrhet::method_name(m));
  csv.row(header);
  const auto measure_row = [&](const std::string& name, auto getter) {
    std::vector<std::string> cells = {name};
    for (const auto m : methods) cells.push_back(getter(metrics.at(m)));
    csv.row(cells);
  };
  measure_row("sensitivity", [&](const mrhet::MethodMetrics& mm) { return fmt(mm.sensitivity); });
  measure_row("specificity", [&](const mrhet::MethodMetrics& mm) { return fmt(mm.specificity); });
  for (int j = 0; j < cfg.n_exposures; ++j) {
    measure_row("mean_bias_theta_" + std::to_string(j + 1),
                [&](const mrhet::MethodMetrics& mm) { return fmt(mm.mean_bias(j)); });
  }
  for (int j = 0; j < cfg.n_exposures; ++j) {
    measure_row("mse_theta_" + std::to_string(j + 1),
                [&](const mrhet::MethodMetrics& mm) { return fmt(mm.mse(j)); });
  }
  measure_row("p_bar", [&](const mrhet::MethodMetrics& mm) { return fmt(mm.p_bar); });
  measure_row("a_bar", [&](const mrhet::MethodMetrics& mm) { return fmt(mm.a_bar); });
  measure_row("failed_runs", [&](const mrhet::MethodMetrics& mm) { return std::to_string(mm.n_failed); });

  std::vector<std::string> method_names;
  for (const auto m : methods) method_names.emplace_back(mrhet::method_name(m));
  json manifest = {{"tool", "mrhet"},
                   {"version", mrhet::kVersion},
                   {"command", "simulate"},
                   {"setting", setting},
                   {"created", timestamp_utc()},
                   {"seed", cfg.seed},
                   {"threads", threads},
                   {"quick", args.quick},
                   {"methods", method_names},
                   {"config",
                    {{"n_individuals", cfg.n_individuals},
                     {"n_snps", cfg.n_snps},
                     {"n_exposures", cfg.n_exposures},
                     {"outlier_fraction", cfg.outlier_fraction},
                     {"pleiotropy_mode",
                      cfg.pleiotropy_mode == mrhet::PleiotropyMode::Directional ? "directional" : "balanced"},
                     {"outlier_effect_dist", cfg.outlier_effect_dist.describe()},
                     {"r2_first_stage", cfg.r2_first_stage},
                     {"r2_second_stage", cfg.r2_second_stage},
                     {"confounder_r2", cfg.confounder_r2},
                     {"causal_effects", cfg.causal_effects},
                     {"pleiotropy_effect", cfg.pleiotropy_effect},
                     {"exposure_error_correlation", cfg.exposure_error_correlation},
                     {"first_stage_coef_mean", cfg.first_stage_coef_mean},
                     {"first_stage_coef_variance", cfg.first_stage_coef_variance},
                     {"n_runs", cfg.n_runs},
                     {"two_sample_split", cfg.two_sample_split},
                     {"presso_simulations", opt.presso_simulations},
                     {"median_bootstrap", opt.median_bootstrap},
                     {"alpha", opt.alpha}}},
                   {"outputs", {"metrics.csv"}}};
  std::ofstream mf(fs::path(args.out_dir) / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';

  std::cout << "simulate: " << setting << " z=" << cfg.n_runs << " N=" << cfg.n_individuals
            << " seed=" << cfg.seed << " -> " << args.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Summary-level Mendelian randomisation with calibrated outlier detection"};
  app.set_version_flag("--version", mrhet::kVersion);
  app.require_subcommand(1);

  AnalyzeArgs a;
  CLI::App* analyze = app.add_subcommand("analyze", "Estimate causal effects and detect outlying variants");
  analyze->add_option("--data", a.data_path, "Summary statistics TSV")->required();
  analyze->add_option("--exposures", a.exposures, "Number of exposures d")->required();
  analyze->add_option("--cov", a.cov_path, "Optional per-SNP exposure covariance TSV");
  analyze->add_option("--method", a.method, "full|standard|sanderson|presso|radial|gcq|median|all")
      ->default_val("all");
  analyze->add_option("--alpha", a.alpha, "Significance level before Bonferroni")->default_val(0.05);
  analyze->add_option("--seed", a.seed, "Seed for randomized methods")->default_val(0);
  analyze->add_option("--out", a.out_dir, "Output directory")->required();
  analyze->add_option("--radial-weights", a.radial_weights, "first|second")->default_val("second");
  analyze->add_option("--second-order-variant", a.second_order_variant, "delta|beta-scaled")
      ->default_val("delta");
  analyze->add_flag("--median-simple", a.median_simple, "Unweighted median estimator");
  analyze->add_option("--presso-sims", a.presso_sims, "Simulation count for the resampling test")
      ->default_val(1000);
  analyze->add_option("--median-bootstrap", a.median_bootstrap, "Bootstrap draws for the median SE")
      ->default_val(1000);

  SimulateArgs s;
  CLI::App* simulate = app.add_subcommand("simulate", "Run a seeded benchmark of the outlier detectors");
  simulate->add_option("--preset", s.preset,
                       "uni5|uni10|uni15|uni20|uni-strong|uni-balanced|multi5|multi10|multi15|multi20|uni50|uni80");
  simulate->add_option("--config", s.config_path, "key = value settings file");
  simulate->add_option("--runs", s.runs, "Override replicate count");
  simulate->add_option("--individuals", s.individuals, "Override cohort size");
  auto* seed_opt = simulate->add_option("--seed", s.seed, "Master seed (default 0, echoed in manifest)");
  simulate->add_option("--out", s.out_dir, "Output directory")->required();
  simulate->add_flag("--quick", s.quick, "Cap runtime for CI");
  simulate->add_option("--threads", s.threads, "Worker threads (default MR_HETERO_THREADS or 1)");
  simulate->add_option("--methods", s.methods_override, "Comma-separated method subset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    if (*analyze) return cmd_analyze(a);
    s.seed_given = seed_opt->count() > 0;
    return cmd_simulate(s);
  } catch (const mrhet::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const mrhet::NumericalError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
