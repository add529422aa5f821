#include <httplib.h>
#include <json.hpp>

#include "medrec/llm.hpp"

namespace medrec {

namespace {

using json = nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

Endpoint split_url(const std::string& url) {
  auto scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0)
    throw Error("backend URL must start with http://: " + url);
  auto slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  if (slash != std::string::npos) e.prefix = url.substr(slash);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  if (e.origin.size() == scheme + 3) throw Error("backend URL has no host: " + url);
  return e;
}

json post(const std::string& backend_id, const std::string& base_url, const std::string& route, const json& body,
          int max_attempts) {
  Endpoint ep = split_url(base_url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(300);
  std::string last;
  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    auto res = client.Post(ep.prefix + route, body.dump(), "application/json");
    if (!res) {
      last = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw BackendError(backend_id, "HTTP " + std::to_string(res->status), false);
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(backend_id, std::string("malformed response: ") + e.what(), false);
    }
  }
  throw BackendError(backend_id, last, true);
}

}  // namespace

HttpEmbedder::HttpEmbedder(std::string base_url, int max_attempts)
    : base_url_(std::move(base_url)), max_attempts_(max_attempts) {
  split_url(base_url_);
}

std::vector<std::vector<double>> HttpEmbedder::embed_batch(const std::vector<std::string>& texts) const {
  json reply = post(backend_id(), base_url_, "/embed", json{{"texts", texts}}, max_attempts_);
  try {
    return reply.at("vectors").get<std::vector<std::vector<double>>>();
  } catch (const json::exception& e) {
    throw BackendError(backend_id(), std::string("malformed response: ") + e.what(), false);
  }
}

HttpGenerator::HttpGenerator(std::string base_url, int max_attempts)
    : base_url_(std::move(base_url)), max_attempts_(max_attempts) {
  split_url(base_url_);
}

std::string HttpGenerator::complete(const GenerationRequest& request) const {
  json body{{"prompt", request.prompt}, {"temperature", request.temperature}};
  json reply = post(backend_id(), base_url_, "/generate", body, max_attempts_);
  try {
    return reply.at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(backend_id(), std::string("malformed response: ") + e.what(), false);
  }
}

}  // namespace medrec
