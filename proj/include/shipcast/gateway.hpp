#pragma once

// Uniform text-generation backends: the local rules-based generator and a
// vendor-neutral JSON-over-HTTP client.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shipcast/bulletin.hpp"
#include "shipcast/categorical.hpp"
#include "shipcast/error.hpp"

namespace shipcast {

struct GenerationRequest {
  std::string area;
  /// Sentence to produce; absent means the whole area bulletin.
  std::optional<FragmentKind> attribute;
  std::optional<std::string> text_input;                ///< data summary
  std::optional<std::filesystem::path> frame_manifest;  ///< frameset.json
  std::string prompt_profile{"default"};

  /// Throws Error(InvalidRequest) unless exactly one input is present.
  void validate() const;
};

struct GenerationResponse {
  std::string text;
  double latency_ms{0.0};
  std::string backend_id;
};

/// Implementations must accept concurrent calls to generate().
class Backend {
 public:
  virtual ~Backend() = default;
  [[nodiscard]] virtual std::string id() const = 0;
  virtual GenerationResponse generate(const GenerationRequest& request) = 0;
};

/// Runs the rules-based generator on a textual data summary.
class LocalBackend : public Backend {
 public:
  explicit LocalBackend(ScaleSet scales, std::string id = "local");
  [[nodiscard]] std::string id() const override { return id_; }
  GenerationResponse generate(const GenerationRequest& request) override;

 private:
  ScaleSet scales_;
  std::string id_;
};

/// Transport failures below the HTTP status level.
class TransportError : public std::runtime_error {
 public:
  TransportError(bool timeout, const std::string& what) : std::runtime_error(what), timeout_(timeout) {}
  [[nodiscard]] bool timeout() const { return timeout_; }

 private:
  bool timeout_;
};

struct HttpReply {
  int status{0};
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Throws TransportError on connect/read failure.
  virtual HttpReply post_json(const std::string& url, const std::string& body,
                              const std::map<std::string, std::string>& headers, double timeout_s) = 0;
};

/// Plain-HTTP transport over cpp-httplib.
std::shared_ptr<HttpTransport> make_http_transport();

struct RemoteConfig {
  std::string endpoint_url;
  double timeout_s{30.0};
  int max_retries{2};
  double backoff_base_s{0.5};
  std::optional<std::string> bearer_token;

  /// Overrides from FF_ENDPOINT_URL, FF_TIMEOUT_S, FF_MAX_RETRIES, FF_BEARER_TOKEN.
  /// Throws Error(ConfigInvalid) for unparsable values.
  [[nodiscard]] RemoteConfig with_env() const;
};

/// Prompt templates, one `<id>.txt` per profile. `{{area}}` and
/// `{{attribute}}` are substituted per request.
class PromptLibrary {
 public:
  PromptLibrary() = default;
  explicit PromptLibrary(std::map<std::string, std::string> templates) : templates_(std::move(templates)) {}
  static PromptLibrary load(const std::filesystem::path& dir);

  /// Throws Error(InvalidRequest) for an unknown profile.
  [[nodiscard]] std::string render(const GenerationRequest& request) const;
  [[nodiscard]] const std::map<std::string, std::string>& templates() const { return templates_; }

 private:
  std::map<std::string, std::string> templates_;
};

class RemoteBackend : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::duration<double>)>;

  RemoteBackend(RemoteConfig config, PromptLibrary prompts, std::shared_ptr<HttpTransport> transport = nullptr,
                std::string id = "remote", Sleeper sleeper = nullptr);
  [[nodiscard]] std::string id() const override { return id_; }
  /// Errors: BackendUnavailable (connect failure, exhausted timeouts, non-2xx),
  /// MalformedResponse (reply lacks a non-empty "text").
  GenerationResponse generate(const GenerationRequest& request) override;

 private:
  RemoteConfig config_;
  PromptLibrary prompts_;
  std::shared_ptr<HttpTransport> transport_;
  std::string id_;
  Sleeper sleeper_;
};

class BackendRegistry {
 public:
  void add(std::shared_ptr<Backend> backend);
  /// Throws Error(UnknownBackend).
  [[nodiscard]] Backend& get(const std::string& id) const;
  [[nodiscard]] bool contains(const std::string& id) const { return backends_.contains(id); }
  GenerationResponse generate(const GenerationRequest& request, const std::string& backend_id) const;

 private:
  std::map<std::string, std::shared_ptr<Backend>> backends_;
};

struct BatchResult {
  std::optional<GenerationResponse> response;
  std::optional<ErrorKind> error_kind;
  std::string error;

  [[nodiscard]] bool ok() const { return response.has_value(); }
};

/// Results line up with `requests`. At most `parallelism` requests are in
/// flight; failures are recorded per item. Throws Error(InvalidRequest) if
/// parallelism is 0.
std::vector<BatchResult> batch_generate(const std::vector<GenerationRequest>& requests, Backend& backend,
                                        std::size_t parallelism);

}  // namespace shipcast
