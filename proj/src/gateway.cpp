#include "shipcast/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "shipcast/generator.hpp"
#include "shipcast/pipeline.hpp"

namespace shipcast {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot read " + p.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

class HttplibTransport : public HttpTransport {
 public:
  HttpReply post_json(const std::string& url, const std::string& body,
                      const std::map<std::string, std::string>& headers, double timeout_s) override {
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) {
      throw TransportError(false, "unsupported endpoint URL '" + url + "'");
    }
    const auto secs = static_cast<time_t>(timeout_s);
    const auto usecs = static_cast<time_t>((timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);
    httplib::Headers h;
    for (const auto& [k, v] : headers) {
      h.emplace(k, v);
    }
    auto res = client.Post(path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timeout = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                           err == httplib::Error::Write;
      throw TransportError(timeout, httplib::to_string(err));
    }
    return {res->status, res->body};
  }
};

}  // namespace

void GenerationRequest::validate() const {
  if (text_input.has_value() == frame_manifest.has_value()) {
    throw Error(ErrorKind::InvalidRequest, "request needs exactly one of text input or frame manifest");
  }
  if (area.empty()) {
    throw Error(ErrorKind::InvalidRequest, "request names no area");
  }
}

LocalBackend::LocalBackend(ScaleSet scales, std::string id) : scales_(std::move(scales)), id_(std::move(id)) {}

GenerationResponse LocalBackend::generate(const GenerationRequest& request) {
  const auto start = Clock::now();
  request.validate();
  if (!request.text_input) {
    throw Error(ErrorKind::InvalidRequest, "the local backend reads text summaries, not frames");
  }
  const auto parsed = parse_data_summary(*request.text_input);
  const Bulletin b = generate_area_bulletin(parsed.inputs, request.area, scales_);
  std::string text;
  if (!request.attribute) {
    text = render_bulletin(b);
  } else {
    switch (*request.attribute) {
      case FragmentKind::Wind: text = render_wind(b.wind); break;
      case FragmentKind::SeaState: text = render_states(b.sea_state); break;
      case FragmentKind::Weather: text = render_weather(b.weather); break;
      case FragmentKind::Visibility: text = render_states(b.visibility); break;
      case FragmentKind::Gale:
        if (!b.gale) {
          throw Error(ErrorKind::InvalidRequest, request.area + ": no gale warning in force");
        }
        text = render_gale(*b.gale);
        break;
      case FragmentKind::Synopsis:
        throw Error(ErrorKind::InvalidRequest, "the synopsis is not an area attribute");
    }
  }
  return {text, elapsed_ms(start), id_};
}

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

RemoteConfig RemoteConfig::with_env() const {
  RemoteConfig out = *this;
  if (const char* v = std::getenv("FF_ENDPOINT_URL")) {
    out.endpoint_url = v;
  }
  try {
    if (const char* v = std::getenv("FF_TIMEOUT_S")) {
      out.timeout_s = std::stod(v);
    }
    if (const char* v = std::getenv("FF_MAX_RETRIES")) {
      out.max_retries = std::stoi(v);
    }
  } catch (const std::exception&) {
    throw Error(ErrorKind::ConfigInvalid, "FF_TIMEOUT_S / FF_MAX_RETRIES must be numeric");
  }
  if (const char* v = std::getenv("FF_BEARER_TOKEN")) {
    out.bearer_token = v;
  }
  if (out.timeout_s <= 0.0 || out.max_retries < 0) {
    throw Error(ErrorKind::ConfigInvalid, "timeout must be positive and max_retries non-negative");
  }
  return out;
}

PromptLibrary PromptLibrary::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::IoError, "prompt directory not found: " + dir.string());
  }
  std::map<std::string, std::string> templates;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      templates[e.path().stem().string()] = read_file(e.path());
    }
  }
  return PromptLibrary(std::move(templates));
}

std::string PromptLibrary::render(const GenerationRequest& request) const {
  const auto it = templates_.find(request.prompt_profile);
  if (it == templates_.end()) {
    throw Error(ErrorKind::InvalidRequest, "unknown prompt profile '" + request.prompt_profile + "'");
  }
  std::string out = it->second;
  replace_all(out, "{{area}}", request.area);
  replace_all(out, "{{attribute}}",
              request.attribute ? std::string(to_string(*request.attribute)) : std::string("bulletin"));
  return out;
}

RemoteBackend::RemoteBackend(RemoteConfig config, PromptLibrary prompts, std::shared_ptr<HttpTransport> transport,
                             std::string id, Sleeper sleeper)
    : config_(std::move(config)),
      prompts_(std::move(prompts)),
      transport_(transport ? std::move(transport) : make_http_transport()),
      id_(std::move(id)),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](std::chrono::duration<double> d) {
        std::this_thread::sleep_for(d);
      })) {}

GenerationResponse RemoteBackend::generate(const GenerationRequest& request) {
  const auto start = Clock::now();
  request.validate();
  if (config_.endpoint_url.empty()) {
    throw Error(ErrorKind::BackendUnavailable, id_ + ": no endpoint URL configured");
  }
  json body = {{"prompt", prompts_.render(request)}};
  if (request.text_input) {
    body["text_input"] = *request.text_input;
  } else {
    try {
      body["media_manifest"] = json::parse(read_file(*request.frame_manifest));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidRequest, "frame manifest is not JSON: " + std::string(e.what()));
    }
  }
  std::map<std::string, std::string> headers;
  if (config_.bearer_token) {
    headers["Authorization"] = "Bearer " + *config_.bearer_token;
  }
  const std::string payload = body.dump();

  HttpReply reply;
  for (int attempt = 0;; ++attempt) {
    try {
      reply = transport_->post_json(config_.endpoint_url, payload, headers, config_.timeout_s);
      break;
    } catch (const TransportError& e) {
      if (!e.timeout() || attempt >= config_.max_retries) {
        throw Error(ErrorKind::BackendUnavailable,
                    id_ + ": " + e.what() + " after " + std::to_string(attempt + 1) + " attempt(s)");
      }
      sleeper_(std::chrono::duration<double>(config_.backoff_base_s * static_cast<double>(1 << attempt)));
    }
  }
  if (reply.status < 200 || reply.status >= 300) {
    throw Error(ErrorKind::BackendUnavailable, id_ + ": HTTP " + std::to_string(reply.status));
  }
  json parsed;
  try {
    parsed = json::parse(reply.body);
  } catch (const json::exception&) {
    throw Error(ErrorKind::MalformedResponse, id_ + ": reply is not JSON");
  }
  if (!parsed.is_object() || !parsed.contains("text") || !parsed["text"].is_string() ||
      parsed["text"].get<std::string>().empty()) {
    throw Error(ErrorKind::MalformedResponse, id_ + ": reply lacks a non-empty \"text\" field");
  }
  return {parsed["text"].get<std::string>(), elapsed_ms(start), id_};
}

void BackendRegistry::add(std::shared_ptr<Backend> backend) {
  const auto id = backend->id();
  backends_[id] = std::move(backend);
}

Backend& BackendRegistry::get(const std::string& id) const {
  const auto it = backends_.find(id);
  if (it == backends_.end()) {
    throw Error(ErrorKind::UnknownBackend, "no backend registered as '" + id + "'");
  }
  return *it->second;
}

GenerationResponse BackendRegistry::generate(const GenerationRequest& request, const std::string& backend_id) const {
  return get(backend_id).generate(request);
}

std::vector<BatchResult> batch_generate(const std::vector<GenerationRequest>& requests, Backend& backend,
                                        std::size_t parallelism) {
  if (parallelism == 0) {
    throw Error(ErrorKind::InvalidRequest, "parallelism must be at least 1");
  }
  std::vector<BatchResult> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < requests.size(); k = next++) {
      try {
        results[k].response = backend.generate(requests[k]);
      } catch (const Error& e) {
        results[k].error_kind = e.kind();
        results[k].error = e.what();
      } catch (const std::exception& e) {
        results[k].error = e.what();
      }
    }
  };
  const std::size_t workers = std::min(parallelism, requests.size());
  if (workers <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back(worker);
  }
  pool.clear();
  return results;
}

}  // namespace shipcast
