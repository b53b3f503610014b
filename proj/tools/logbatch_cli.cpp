// logbatch command-line front end: parse, evaluate, cache dump/load.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "logbatch/config.hpp"
#include "logbatch/errors.hpp"
#include "logbatch/eval.hpp"
#include "logbatch/ingest.hpp"
#include "logbatch/pipeline.hpp"
#include "logbatch/preprocess.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitGeneric = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitCoverage = 4;

struct ParseArgs {
  std::string input;
  std::string config;
  std::string output;
  std::string format = "auto";
  std::string header_regex;
  std::string truth;
  std::string cache_in;
  std::string rules;
  std::vector<std::string> sets;

  std::optional<double> eps;
  std::optional<int> min_samples;
  std::optional<int> batch_size;
  std::optional<std::string> sampling;
  std::optional<std::string> backend;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> chunk_size;
  std::optional<int> workers;
  std::optional<int> max_retries;
  std::optional<double> temperature;
  std::optional<std::string> extra_delims;
  bool no_partitioning = false;
  bool no_caching = false;
  bool no_fallback = false;
};

logbatch::ConfigOverrides collect_overrides(const ParseArgs& a) {
  logbatch::ConfigOverrides o;
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw logbatch::ConfigError(kv, "--set expects key=value, got '" + kv + "'");
    o[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  const auto put = [&](const char* key, const auto& v) {
    if (v) {
      std::ostringstream s;
      s.precision(17);
      s << *v;
      o[key] = s.str();
    }
  };
  put("dbscan_eps", a.eps);
  put("dbscan_min_samples", a.min_samples);
  put("batch_size", a.batch_size);
  put("sampling_method", a.sampling);
  put("llm_backend", a.backend);
  put("rng_seed", a.seed);
  put("chunk_size", a.chunk_size);
  put("workers", a.workers);
  put("max_retries", a.max_retries);
  put("temperature", a.temperature);
  put("extra_delims", a.extra_delims);
  if (a.no_partitioning) o["partitioning_enabled"] = "false";
  if (a.no_caching) o["caching_enabled"] = "false";
  if (a.no_fallback) o["fallback_enabled"] = "false";
  return o;
}

logbatch::IngestResult load_input(const ParseArgs& a) {
  std::string format = a.format;
  if (format == "auto") {
    format = (!a.header_regex.empty() || std::filesystem::path(a.input).extension() != ".csv") ? "raw" : "structured";
  }
  if (format == "structured") return logbatch::load_structured(a.input);
  if (format == "raw") return logbatch::load_raw(a.input, a.header_regex);
  throw logbatch::ConfigError("format", "--format: expected auto|structured|raw");
}

int run_parse(const ParseArgs& a) {
  const auto cfg = logbatch::load_config(a.config, collect_overrides(a));
  const auto data = load_input(a);

  std::unordered_map<std::string, std::string> oracle;
  if (cfg.llm_backend == logbatch::BackendKind::offline_oracle) {
    const auto truth_data = a.truth.empty() ? data : logbatch::load_structured(a.truth);
    if (!truth_data.truth_templates) {
      throw logbatch::ConfigError("llm_backend", "offline_oracle: no EventTemplate column in the truth input");
    }
    for (std::size_t i = 0; i < truth_data.records.size(); ++i) {
      oracle.emplace(truth_data.records[i].content, (*truth_data.truth_templates)[i]);
    }
  }
  const auto rules = a.rules.empty() ? logbatch::RuleTable::defaults() : logbatch::RuleTable::load(a.rules);
  logbatch::Pipeline pipeline(cfg, logbatch::make_backend(cfg, oracle), rules);
  if (!a.cache_in.empty()) pipeline.cache().load(a.cache_in);

  try {
    const auto result = logbatch::parse_dataset(pipeline, data.records, a.input, a.output);
    const auto& m = result.manifest;
    std::cerr << "parsed " << m.records << " records (" << data.skipped_empty << " blank skipped, "
              << data.header_mismatches << " header mismatches, " << data.replaced_bytes
              << " invalid UTF-8 sequences replaced)\n"
              << "chunks " << m.chunks.size() << ", invocations " << m.ledger.invocations << ", cache hits "
              << m.cache_hits() << ", T_total " << m.ledger.total_tokens << ", templates "
              << pipeline.cache().size() << ", " << m.wall_seconds << " s\n"
              << "wrote " << a.output << "/outcomes.tsv\n";
  } catch (const logbatch::RunAborted& e) {
    std::cerr << "error: " << e.what() << "\npartial results: " << a.output << "/outcomes.partial.tsv ("
              << e.partial().size() << " records)\n";
    return kExitBackend;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logbatch: demonstration-free batched LLM log parser"};
  app.require_subcommand(1);

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Parse a log file into templates and parameters");
  parse->add_option("--input", pa.input, "Input log file (.csv structured, otherwise raw)")->required();
  parse->add_option("--config", pa.config, "Config file (sectioned key = value)");
  parse->add_option("--output", pa.output, "Output directory")->required();
  parse->add_option("--format", pa.format, "auto|structured|raw")->capture_default_str();
  parse->add_option("--header-regex", pa.header_regex, "Raw mode header pattern with a (?<Content>...) group");
  parse->add_option("--truth", pa.truth, "Structured CSV with EventTemplate for the offline oracle");
  parse->add_option("--cache", pa.cache_in, "Preload a template cache dump");
  parse->add_option("--rules", pa.rules, "Template normalisation rule file");
  parse->add_option("--set", pa.sets, "Generic override key=value (repeatable)");
  parse->add_option("--eps", pa.eps, "DBSCAN eps");
  parse->add_option("--min-samples", pa.min_samples, "DBSCAN min_samples");
  parse->add_option("--batch-size", pa.batch_size, "Logs per prompt (1 disables batching)");
  parse->add_option("--sampling", pa.sampling, "diversity|similarity|random");
  parse->add_option("--backend", pa.backend, "http|offline_oracle|fallback_only");
  parse->add_option("--seed", pa.seed, "Sampling RNG seed");
  parse->add_option("--chunk-size", pa.chunk_size, "Records per chunk");
  parse->add_option("--workers", pa.workers, "Concurrent chunk workers");
  parse->add_option("--max-retries", pa.max_retries, "HTTP retries per request");
  parse->add_option("--temperature", pa.temperature, "Sampling temperature sent to the backend");
  parse->add_option("--extra-delims", pa.extra_delims, "Additional tokenizer delimiters");
  parse->add_flag("--no-partitioning", pa.no_partitioning, "Fixed windows instead of clustering");
  parse->add_flag("--no-caching", pa.no_caching, "Disable the template cache");
  parse->add_flag("--no-fallback", pa.no_fallback, "Abort instead of voting when the backend fails");

  std::string outcomes_dir;
  std::string truth_path;
  std::string ed_mode = "record_mean";
  bool emit_confusion = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score a parse run against ground truth");
  evaluate->add_option("--outcomes", outcomes_dir, "Directory written by parse")->required();
  evaluate->add_option("--truth", truth_path, "Structured CSV with EventTemplate")->required();
  evaluate->add_option("--ed-mode", ed_mode, "record_mean|template_pair_mean")->capture_default_str();
  evaluate->add_flag("--emit-confusion", emit_confusion, "Include per-template mismatches");

  std::string cache_path;
  std::string cache_out;
  auto* cache = app.add_subcommand("cache", "Inspect or re-serialise a template cache");
  cache->require_subcommand(1);
  auto* dump = cache->add_subcommand("dump", "Print cache entries in probe order");
  dump->add_option("--cache", cache_path, "Cache file")->required();
  auto* load = cache->add_subcommand("load", "Validate a cache file, optionally writing it back normalised");
  load->add_option("--cache", cache_path, "Cache file")->required();
  load->add_option("--output", cache_out, "Write the validated cache here");

  auto* masks = app.add_subcommand("masks", "Print the masking rules (same as parse --dump-masks)");
  bool dump_masks = false;
  parse->add_flag("--dump-masks", dump_masks, "Print masking rules and exit");

  // --dump-masks short-circuits the required options.
  for (int i = 1; i < argc; ++i) {
    if (std::string_view(argv[i]) == "--dump-masks") {
      std::cout << logbatch::dump_mask_rules();
      return kExitOk;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*masks) {
      std::cout << logbatch::dump_mask_rules();
      return kExitOk;
    }
    if (*parse) return run_parse(pa);
    if (*evaluate) {
      const auto truth = logbatch::load_ground_truth(truth_path);
      const auto r = logbatch::evaluate_run(outcomes_dir, truth, logbatch::parse_ed_mode(ed_mode), emit_confusion);
      std::cout << logbatch::format_report_text(r, emit_confusion);
      return kExitOk;
    }
    if (*dump) {
      logbatch::TemplateCache c;
      c.load(cache_path);
      for (const auto& e : c.entries()) std::cout << e.frequency << '\t' << e.tmpl.text() << '\n';
      return kExitOk;
    }
    if (*load) {
      logbatch::TemplateCache c;
      c.load(cache_path);
      std::cout << c.size() << " entries OK\n";
      if (!cache_out.empty()) c.dump(cache_out);
      return kExitOk;
    }
  } catch (const logbatch::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const logbatch::CoverageError& e) {
    std::cerr << "coverage error: " << e.what() << '\n';
    return kExitCoverage;
  } catch (const logbatch::BackendUnavailable& e) {
    std::cerr << "backend error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitGeneric;
  }
  return kExitGeneric;
}
