#include "fixtures.hpp"

#include <json.hpp>
#include <set>

namespace fixtures {

namespace {

// No word here is all hex digits, so the hex normalisation rule leaves them.
const std::vector<std::string> kKeywords = {
    "Starting", "Stopping", "Received", "Sending", "Failed", "Opened", "Closed", "Removing", "Adding", "Verifying",
    "Registering", "Scheduling", "Rejecting", "Loading", "Writing", "Reading", "Connecting", "Timeout", "Retrying",
    "Shutting", "Mounting", "Unmounting", "Allocating", "Releasing", "Syncing", "Parsing", "Resolving", "Updating"};

const std::vector<std::string> kWords = {
    "block", "session", "worker", "request", "from", "to", "with", "node", "task", "queue", "user", "server",
    "client", "for", "on", "job", "container", "service", "handler", "state", "memory", "disk", "socket", "pool"};

enum class VarKind { number, hex, ip, ident, name, path };

std::string gen_value(VarKind kind, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(0, 99999);
  switch (kind) {
    case VarKind::number: return std::to_string(small(rng));
    case VarKind::hex: {
      static const char* digits = "0123456789abcdef";
      std::string s = "0x";
      for (int i = 0; i < 6; ++i) s.push_back(digits[small(rng) % 16]);
      return s;
    }
    case VarKind::ip:
      return std::to_string(small(rng) % 256) + "." + std::to_string(small(rng) % 256) + "." +
             std::to_string(small(rng) % 256) + "." + std::to_string(small(rng) % 256);
    case VarKind::ident: return "blk_" + std::to_string(small(rng)) + "_" + std::to_string(small(rng) % 97);
    case VarKind::name: {
      static const std::vector<std::string> names = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
                                                     "golf", "hotel", "india", "juliet", "kilo", "lima"};
      return names[static_cast<std::size_t>(small(rng)) % names.size()] + std::to_string(small(rng) % 1000);
    }
    case VarKind::path: return "/var/data/" + std::to_string(small(rng)) + "/part-" + std::to_string(small(rng) % 50);
  }
  return "x";
}

struct TemplateSpec {
  std::string text;
  std::vector<VarKind> kinds;
};

TemplateSpec make_template(const std::string& keyword, bool opaque, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(2, 7);
  std::uniform_int_distribution<int> coin(0, 99);
  TemplateSpec spec;
  spec.text = keyword;
  const int n = len(rng);
  bool prev_wild = false;
  for (int i = 0; i < n; ++i) {
    const bool wild = coin(rng) < 40 && !prev_wild;
    spec.text += ' ';
    if (!wild) {
      spec.text += kWords[static_cast<std::size_t>(coin(rng)) % kWords.size()];
      prev_wild = false;
      continue;
    }
    const int shape = coin(rng) % 4;
    VarKind kind;
    if (opaque) {
      kind = static_cast<VarKind>(coin(rng) % 6);
    } else {
      kind = static_cast<VarKind>(coin(rng) % 3);
    }
    const char* forms[] = {"<*>", "id=<*>", "[<*>]", "(<*>)"};
    // Paths keep '/', which disables refined splitting; use them bare.
    spec.text += kind == VarKind::path ? "<*>" : forms[shape];
    spec.kinds.push_back(kind);
    prev_wild = true;
  }
  if (spec.kinds.empty() && coin(rng) < 70) {
    spec.text += " <*>";
    spec.kinds.push_back(opaque ? VarKind::ident : VarKind::number);
  }
  return spec;
}

std::string instantiate(const TemplateSpec& spec, std::mt19937_64& rng) {
  std::string out;
  std::size_t pos = 0;
  std::size_t k = 0;
  while (true) {
    const auto next = spec.text.find("<*>", pos);
    out.append(spec.text, pos, next == std::string::npos ? std::string::npos : next - pos);
    if (next == std::string::npos) break;
    out += gen_value(spec.kinds[k++], rng);
    pos = next + 3;
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

Dataset from_specs(const std::vector<TemplateSpec>& specs, std::size_t lines, double repeat_fraction,
                   std::mt19937_64& rng) {
  Dataset d;
  for (const auto& s : specs) d.templates.push_back(s.text);
  // Zipf-ish template frequencies.
  std::vector<double> weights;
  for (std::size_t i = 0; i < specs.size(); ++i) weights.push_back(1.0 / static_cast<double>(i + 1));
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Every template appears at least once.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < lines; ++i) order.push_back(i < specs.size() ? i : pick(rng));
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < lines; ++i) {
    std::string content;
    std::size_t t = order[i];
    if (!d.records.empty() && u(rng) < repeat_fraction) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(0, d.records.size() - 1)(rng);
      content = d.records[j].content;
      t = static_cast<std::size_t>(std::find(d.templates.begin(), d.templates.end(), d.truth[j]) - d.templates.begin());
    } else {
      content = instantiate(specs[t], rng);
    }
    d.records.push_back(logbatch::LogRecord{i, content, content});
    d.truth.push_back(specs[t].text);
  }
  return d;
}

}  // namespace

std::unordered_map<std::string, std::string> Dataset::truth_by_content() const {
  std::unordered_map<std::string, std::string> m;
  for (std::size_t i = 0; i < records.size(); ++i) m.emplace(records[i].content, truth[i]);
  return m;
}

std::string Dataset::to_csv() const {
  std::string out = "LineId,Content,EventTemplate\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out += std::to_string(i + 1) + "," + csv_quote(records[i].content) + "," + csv_quote(truth[i]) + "\n";
  }
  return out;
}

Dataset make_dataset(std::uint64_t seed, const DatasetOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> keywords = kKeywords;
  std::shuffle(keywords.begin(), keywords.end(), rng);
  std::vector<TemplateSpec> specs;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < options.templates && i < keywords.size(); ++i) {
    specs.push_back(make_template(keywords[i], options.opaque_variables, rng));
  }
  return from_specs(specs, options.lines, options.repeat_fraction, rng);
}

Dataset two_template_dataset(std::size_t lines) {
  std::mt19937_64 rng(7);
  const std::vector<TemplateSpec> specs = {
      {"Sending <*> bytes to <*> port <*>", {VarKind::number, VarKind::ip, VarKind::number}},
      {"Received block <*> of size <*> from <*>", {VarKind::hex, VarKind::number, VarKind::ip}},
  };
  Dataset d;
  for (const auto& s : specs) d.templates.push_back(s.text);
  for (std::size_t i = 0; i < lines; ++i) {
    const auto& s = specs[i % 2];
    const auto content = instantiate(s, rng);
    d.records.push_back(logbatch::LogRecord{i, content, content});
    d.truth.push_back(s.text);
  }
  return d;
}

Dataset repeated_line_dataset(std::size_t copies) {
  Dataset d;
  const std::string line = "Failed to report rdd_5_1 to master; giving up";
  const std::string tmpl = "Failed to report <*> to master; giving up";
  d.templates.push_back(tmpl);
  for (std::size_t i = 0; i < copies; ++i) {
    d.records.push_back(logbatch::LogRecord{i, line, line});
    d.truth.push_back(tmpl);
  }
  return d;
}

logbatch::LlmReply NoisyOracleBackend::complete(const logbatch::PromptSpec& prompt) {
  std::set<std::string> distinct(prompt.batch.logs.begin(), prompt.batch.logs.end());
  const auto& first = prompt.batch.logs.front();
  logbatch::LlmReply reply;
  const auto it = truth_.find(first);
  reply.raw_text = "`" + ((distinct.size() >= 2 && it != truth_.end()) ? it->second : first) + "`";
  reply.prompt_tokens = logbatch::estimate_tokens(prompt.rendered);
  reply.completion_tokens = logbatch::estimate_tokens(reply.raw_text);
  reply.tokens_estimated = true;
  reply.backend_id = id();
  return reply;
}

logbatch::HttpTransport ScriptedTransport::bind() {
  return [this](const logbatch::HttpRequest& req) {
    seen.push_back(req);
    if (seen.size() <= script.size()) return script[seen.size() - 1];
    return script.empty() ? logbatch::HttpResponse{} : script.back();
  };
}

std::string chat_completion_json(const std::string& content, int prompt_tokens, int completion_tokens) {
  nlohmann::json j = {{"id", "cmpl-1"},
                      {"object", "chat.completion"},
                      {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}}};
  if (prompt_tokens >= 0) {
    j["usage"] = {{"prompt_tokens", prompt_tokens},
                  {"completion_tokens", completion_tokens},
                  {"total_tokens", prompt_tokens + completion_tokens}};
  }
  return j.dump();
}

}  // namespace fixtures
