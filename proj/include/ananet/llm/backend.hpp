#pragma once

// Completion backends. Every prompt issued by the generator and the optimizer
// is a CompletionRequest naming a shipped template plus its parameters. The
// request digest keys recorded completions, so replay needs no template text.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ananet/document.hpp"
#include "ananet/error.hpp"
#include "ananet/text.hpp"

namespace ananet::llm {

namespace templates {
inline constexpr std::string_view kObjectsAtLocation = "objects_at_location.v1";
inline constexpr std::string_view kObjectActions = "object_actions.v1";
inline constexpr std::string_view kSpatialFacts = "spatial_facts.v1";
inline constexpr std::string_view kConditionActions = "condition_actions.v1";
inline constexpr std::string_view kAgentForStatus = "agent_for_status.v1";
inline constexpr std::string_view kAgentForStatusRetry = "agent_for_status_retry.v1";
inline constexpr std::string_view kStatusSimilarity = "status_similarity.v1";
inline constexpr std::string_view kAgentSimilarity = "agent_similarity.v1";

inline constexpr std::array kAll{kObjectsAtLocation, kObjectActions,    kSpatialFacts,      kConditionActions,
                                 kAgentForStatus,    kAgentForStatusRetry, kStatusSimilarity, kAgentSimilarity};

inline bool known(std::string_view id) { return std::find(kAll.begin(), kAll.end(), id) != kAll.end(); }
}  // namespace templates

struct Decoding {
  double temperature = 0.0;
  int max_tokens = 512;
  bool operator==(const Decoding&) const = default;
};

struct CompletionRequest {
  std::string template_id;
  std::vector<std::pair<std::string, std::string>> parameters;  // ordered
  Decoding decoding;

  static CompletionRequest make(std::string_view id, std::vector<std::pair<std::string, std::string>> params,
                                Decoding decoding = {}) {
    if (!templates::known(id)) throw UnknownTemplate(std::string(id));
    return CompletionRequest{std::string(id), std::move(params), decoding};
  }

  bool operator==(const CompletionRequest&) const = default;
};

namespace detail {

inline std::string escape_value(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == '\\')
      out += "\\\\";
    else if (c == '\n')
      out += "\\n";
    else
      out.push_back(c);
  }
  return out;
}

inline std::string unescape_value(std::string_view v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      out.push_back(v[i + 1] == 'n' ? '\n' : v[i + 1]);
      ++i;
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

inline std::string format_temperature(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

}  // namespace detail

// Stable 16-hex-digit digest of (template id, ordered parameters, decoding).
inline std::string digest(const CompletionRequest& req) {
  std::string canon = "ananet-request-v1\ntemplate:" + req.template_id + "\n";
  for (const auto& [k, v] : req.parameters) canon += "param:" + k + "=" + detail::escape_value(v) + "\n";
  canon += "temperature:" + detail::format_temperature(req.decoding.temperature) + "\n";
  canon += "max_tokens:" + std::to_string(req.decoding.max_tokens) + "\n";
  return text::hex64(text::fnv1a64(canon));
}

// Prompt template texts with {name} placeholders, loaded from a directory of
// "<template id>.txt" files.
class TemplateSet {
public:
  static TemplateSet load(const std::filesystem::path& dir) {
    TemplateSet set;
    for (auto id : templates::kAll) {
      const auto path = dir / (std::string(id) + ".txt");
      if (!std::filesystem::exists(path))
        throw Error("prompt template '" + path.string() + "' is missing", "set ANANET_TEMPLATE_DIR or --templates");
      set.texts_.emplace(std::string(id), io::read_file(path.string()));
    }
    return set;
  }

  std::string render(const CompletionRequest& req) const {
    auto it = texts_.find(req.template_id);
    if (it == texts_.end()) throw UnknownTemplate(req.template_id);
    std::string out;
    const std::string& t = it->second;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '{') {
        auto close = t.find('}', i);
        if (close != std::string::npos) {
          const auto name = t.substr(i + 1, close - i - 1);
          auto p = std::find_if(req.parameters.begin(), req.parameters.end(),
                                [&](const auto& kv) { return kv.first == name; });
          if (p == req.parameters.end())
            throw BackendError("template '" + req.template_id + "' needs parameter '" + name + "'");
          out += p->second;
          i = close;
          continue;
        }
      }
      out.push_back(t[i]);
    }
    return out;
  }

private:
  std::map<std::string, std::string> texts_;
};

struct FixtureEntry {
  CompletionRequest request;
  std::string completion;
  std::string model = "unknown";
  std::string recorded_at = "unknown";
};

// Fixture file: "key: value" header lines, a "---" separator line, then the
// completion verbatim.
inline std::string format_fixture(const FixtureEntry& e) {
  std::string out = "# ananet fixture v1\n";
  out += "template: " + e.request.template_id + "\n";
  for (const auto& [k, v] : e.request.parameters) out += "param " + k + ": " + detail::escape_value(v) + "\n";
  out += "temperature: " + detail::format_temperature(e.request.decoding.temperature) + "\n";
  out += "max_tokens: " + std::to_string(e.request.decoding.max_tokens) + "\n";
  out += "model: " + e.model + "\n";
  out += "recorded_at: " + e.recorded_at + "\n";
  out += "---\n";
  out += e.completion;
  return out;
}

inline FixtureEntry parse_fixture(std::string_view content, const std::string& origin) {
  FixtureEntry e;
  std::size_t pos = 0;
  bool saw_separator = false, saw_template = false;
  while (pos < content.size()) {
    auto eol = content.find('\n', pos);
    if (eol == std::string_view::npos) eol = content.size();
    std::string_view line = content.substr(pos, eol - pos);
    pos = std::min(eol + 1, content.size());
    if (line == "---") {
      saw_separator = true;
      break;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw Error("malformed fixture header line in " + origin);
    const std::string key(text::trim(line.substr(0, colon)));
    std::string_view rest = line.substr(colon + 1);
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    const std::string value(rest);
    if (key == "template") {
      e.request.template_id = value;
      saw_template = true;
    } else if (key.rfind("param ", 0) == 0) {
      e.request.parameters.emplace_back(key.substr(6), detail::unescape_value(value));
    } else if (key == "temperature") {
      e.request.decoding.temperature = std::strtod(value.c_str(), nullptr);
    } else if (key == "max_tokens") {
      e.request.decoding.max_tokens = std::atoi(value.c_str());
    } else if (key == "model") {
      e.model = value;
    } else if (key == "recorded_at") {
      e.recorded_at = value;
    }
  }
  if (!saw_template || !saw_separator) throw Error("fixture " + origin + " lacks a template line or '---' separator");
  e.completion = std::string(content.substr(pos));
  return e;
}

// Directory of "<digest>.fixture" files. Lookups are exact on digest; record
// mode only ever adds files.
class FixtureStore {
public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::exists(dir_)) return;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir_))
      if (entry.is_regular_file() && entry.path().extension() == ".fixture") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      auto e = parse_fixture(io::read_file(f.string()), f.string());
      const auto d = digest(e.request);
      if (f.stem().string() != d) misnamed_.push_back(f);
      entries_.emplace(d, std::move(e));
    }
  }

  const std::filesystem::path& directory() const noexcept { return dir_; }

  const FixtureEntry* find(const std::string& digest_hex) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(digest_hex);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Persists a new entry; an existing digest is left untouched.
  void append(FixtureEntry e) {
    std::lock_guard lock(mu_);
    const auto d = digest(e.request);
    if (entries_.count(d)) return;
    std::filesystem::create_directories(dir_);
    io::write_file((dir_ / (d + ".fixture")).string(), format_fixture(e));
    entries_.emplace(d, std::move(e));
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

  // Files whose name does not match the digest of their request.
  const std::vector<std::filesystem::path>& misnamed() const noexcept { return misnamed_; }

  // Renames misnamed files to "<digest>.fixture". Returns the number renamed.
  std::size_t rehash() {
    std::lock_guard lock(mu_);
    std::size_t renamed = 0;
    for (const auto& f : misnamed_) {
      auto e = parse_fixture(io::read_file(f.string()), f.string());
      const auto target = dir_ / (digest(e.request) + ".fixture");
      if (std::filesystem::exists(target)) {
        std::filesystem::remove(f);
      } else {
        std::filesystem::rename(f, target);
      }
      ++renamed;
    }
    misnamed_.clear();
    return renamed;
  }

private:
  std::filesystem::path dir_;
  std::map<std::string, FixtureEntry> entries_;
  std::vector<std::filesystem::path> misnamed_;
  mutable std::mutex mu_;
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string complete(const CompletionRequest& request) = 0;
};

// Sends a rendered prompt somewhere and returns the completion text.
class Transport {
public:
  virtual ~Transport() = default;
  virtual std::string send(const std::string& prompt, const Decoding& decoding) = 0;
};

class ReplayBackend final : public Backend {
public:
  explicit ReplayBackend(std::shared_ptr<const FixtureStore> store) : store_(std::move(store)) {}

  std::string complete(const CompletionRequest& request) override {
    if (!templates::known(request.template_id)) throw UnknownTemplate(request.template_id);
    const auto d = digest(request);
    if (const auto* hit = store_->find(d)) return hit->completion;
    std::string params;
    for (const auto& [k, v] : request.parameters)
      params += (params.empty() ? "" : ", ") + k + "=\"" + v.substr(0, 60) + "\"";
    throw FixtureMiss(request.template_id, d, params);
  }

private:
  std::shared_ptr<const FixtureStore> store_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_delay{1000};
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };
};

// Renders the template and calls the transport, retrying transport failures
// with exponential backoff. At most `max_in_flight` calls run concurrently.
class LiveBackend final : public Backend {
public:
  LiveBackend(TemplateSet templates, std::shared_ptr<Transport> transport, RetryPolicy retry = {},
              std::ptrdiff_t max_in_flight = 4)
      : templates_(std::move(templates)), transport_(std::move(transport)), retry_(std::move(retry)),
        slots_(std::max<std::ptrdiff_t>(1, std::min<std::ptrdiff_t>(max_in_flight, 64))) {}

  std::string complete(const CompletionRequest& request) override {
    if (!templates::known(request.template_id)) throw UnknownTemplate(request.template_id);
    const auto prompt = templates_.render(request);
    auto delay = retry_.initial_delay;
    for (int attempt = 1;; ++attempt) {
      try {
        slots_.acquire();
        struct Release {
          std::counting_semaphore<64>& s;
          ~Release() { s.release(); }
        } release{slots_};
        return transport_->send(prompt, request.decoding);
      } catch (const TransportError&) {
        if (attempt >= retry_.attempts) throw;
      }
      retry_.sleep(delay);
      delay *= 2;
    }
  }

private:
  TemplateSet templates_;
  std::shared_ptr<Transport> transport_;
  RetryPolicy retry_;
  std::counting_semaphore<64> slots_;
};

// Calls through to a live backend and persists every answer under its digest.
class RecordBackend final : public Backend {
public:
  RecordBackend(std::shared_ptr<Backend> live, std::shared_ptr<FixtureStore> store, std::string model,
                std::function<std::string()> clock = utc_now)
      : live_(std::move(live)), store_(std::move(store)), model_(std::move(model)), clock_(std::move(clock)) {}

  std::string complete(const CompletionRequest& request) override {
    auto text = live_->complete(request);
    store_->append(FixtureEntry{request, text, model_, clock_()});
    return text;
  }

  static std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

private:
  std::shared_ptr<Backend> live_;
  std::shared_ptr<FixtureStore> store_;
  std::string model_;
  std::function<std::string()> clock_;
};

enum class Mode { Live, Record, Replay };

inline Mode parse_mode(std::string_view s) {
  if (s == "live") return Mode::Live;
  if (s == "record") return Mode::Record;
  if (s == "replay") return Mode::Replay;
  throw InvalidConfig("unknown backend mode '" + std::string(s) + "' (expected live, record or replay)");
}

// Backend settings, usually read from the environment:
//   ANANET_LLM_ENDPOINT, ANANET_LLM_API_KEY, ANANET_LLM_MODEL,
//   ANANET_LLM_MODE (live|record|replay), ANANET_FIXTURE_DIR, ANANET_TEMPLATE_DIR
struct BackendConfig {
  Mode mode = Mode::Replay;
  std::string endpoint;
  std::string api_key;
  std::string model = "gpt-4o";
  std::filesystem::path fixture_dir = "fixtures";
  std::filesystem::path template_dir = "templates";
  int max_in_flight = 4;

  static BackendConfig from_env() {
    BackendConfig c;
    auto env = [](const char* name) -> std::string {
      const char* v = std::getenv(name);
      return v ? v : "";
    };
    if (auto m = env("ANANET_LLM_MODE"); !m.empty()) c.mode = parse_mode(m);
    c.endpoint = env("ANANET_LLM_ENDPOINT");
    c.api_key = env("ANANET_LLM_API_KEY");
    if (auto m = env("ANANET_LLM_MODEL"); !m.empty()) c.model = m;
    if (auto d = env("ANANET_FIXTURE_DIR"); !d.empty()) c.fixture_dir = d;
    if (auto d = env("ANANET_TEMPLATE_DIR"); !d.empty()) c.template_dir = d;
    return c;
  }
};

// Replay never touches `transport`; live and record require it.
inline std::shared_ptr<Backend> make_backend(const BackendConfig& cfg, std::shared_ptr<Transport> transport,
                                             RetryPolicy retry = {}) {
  if (cfg.mode == Mode::Replay) return std::make_shared<ReplayBackend>(std::make_shared<FixtureStore>(cfg.fixture_dir));
  if (!transport) throw InvalidConfig("live and record modes need a transport (set ANANET_LLM_ENDPOINT)");
  auto live = std::make_shared<LiveBackend>(TemplateSet::load(cfg.template_dir), std::move(transport),
                                            std::move(retry), cfg.max_in_flight);
  if (cfg.mode == Mode::Live) return live;
  return std::make_shared<RecordBackend>(live, std::make_shared<FixtureStore>(cfg.fixture_dir), cfg.model);
}

}  // namespace ananet::llm
