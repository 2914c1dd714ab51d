// Copyright 2026 The Lacuna Authors.
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


#include "lacuna/service/service.hpp"

#include <functional>

#include "httplib.h"
#include "lacuna/text/utf8.hpp"
#include "lacuna/text/vocab.hpp"

namespace lacuna::service {

namespace {

constexpr char kPlaceholderUi[] =
    "<!doctype html><html><head><meta charset=\"utf-8\"><title>lacuna</title></head><body>"
    "<p>The restoration workbench is not installed. Start the server with <code>--ui DIR</code> "
    "pointing at the built assets, or use the JSON API under <code>/v1</code>.</p></body></html>";

std::u32string text_field(const nlohmann::json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_string()) {
    throw ServiceError(400, std::string("missing string field '") + name + "'");
  }
  auto decoded = text::try_decode_utf8(body[name].get<std::string>());
  if (!decoded) throw ServiceError(400, std::string("field '") + name + "' is not valid UTF-8");
  return *decoded;
}

size_t size_field(const nlohmann::json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_number_integer() || body[name].get<int64_t>() < 0) {
    throw ServiceError(400, std::string("missing non-negative integer field '") + name + "'");
  }
  return body[name].get<size_t>();
}

}  // namespace

RestorationService::RestorationService(const decode::Restorer& restorer, SessionStore& store, ServiceOptions options)
    : restorer_(restorer), store_(store), options_(std::move(options)) {
  options_.beam.validate();
}

decode::BeamConfig RestorationService::beam_from(const nlohmann::json& body) const {
  decode::BeamConfig beam = options_.beam;
  if (body.contains("beam_width")) beam.beam_width = static_cast<int>(size_field(body, "beam_width"));
  if (body.contains("top_k")) beam.top_k = static_cast<int>(size_field(body, "top_k"));
  if (beam.beam_width > options_.max_beam_width) {
    throw ServiceError(400, "beam_width above the server limit of " + std::to_string(options_.max_beam_width));
  }
  try {
    beam.validate();
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, e.what());
  }
  return beam;
}

nlohmann::json RestorationService::run(std::u32string_view masked, size_t gap_start, size_t gap_length,
                                       const decode::BeamConfig& beam) const {
  if (gap_length > options_.max_context) throw ServiceError(400, "gap longer than the context window");
  const auto [begin, end] = decode::context_window(masked.size(), gap_start, gap_length, options_.max_context);
  const std::u32string_view window = masked.substr(begin, end - begin);
  std::vector<uint8_t> mask(window.size());
  for (size_t i = 0; i < window.size(); ++i) mask[i] = window[i] == text::kPredictChar;

  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : restorer_.restore(window, beam)) {
    hyps.push_back(decode::hypothesis_json(h, decode::scale_attention_for_viz(h.attention, mask)));
  }
  return {{"start", gap_start},
          {"length", gap_length},
          {"window", {{"start", begin}, {"end", end}}},
          {"hypotheses", std::move(hyps)}};
}

nlohmann::json RestorationService::create_session(const nlohmann::json& body) {
  return to_json(store_.create(text_field(body, "text")));
}

nlohmann::json RestorationService::get_session(const std::string& id) const { return to_json(store_.get(id)); }

nlohmann::json RestorationService::propose(const std::string& id, const nlohmann::json& body) const {
  const Session s = store_.get(id);
  const size_t start = size_field(body, "start");
  const size_t length = size_field(body, "length");
  check_lacuna_span(s.text, start, length);
  const auto beam = beam_from(body);
  std::u32string masked = s.text;
  masked.replace(start, length, length, text::kPredictChar);
  nlohmann::json out = run(masked, start, length, beam);
  out["session"] = s.id;
  return out;
}

nlohmann::json RestorationService::accept(const std::string& id, const nlohmann::json& body) {
  std::optional<double> log_prob;
  if (body.is_object() && body.contains("log_prob") && body["log_prob"].is_number()) {
    log_prob = body["log_prob"].get<double>();
  }
  return to_json(store_.accept(id, size_field(body, "start"), size_field(body, "length"), text_field(body, "text"),
                               log_prob));
}

nlohmann::json RestorationService::restore(const nlohmann::json& body) const {
  const std::u32string t = text_field(body, "text");
  size_t start = 0, length = 0;
  try {
    std::tie(start, length) = decode::find_single_gap(t);
  } catch (const std::invalid_argument& e) {
    throw ServiceError(400, e.what());
  }
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] != text::kPredictChar && !restorer_.alphabet().is_text_symbol(t[i])) {
      throw ServiceError(400, "character '" + text::encode_utf8(t[i]) + "' at position " + std::to_string(i) +
                                  " is not in the model alphabet");
    }
  }
  return run(t, start, length, beam_from(body));
}

nlohmann::json RestorationService::health() const {
  return {{"status", "ok"}, {"model", options_.model_id}, {"kind", options_.model_kind},
          {"sessions", store_.size()}};
}

void RestorationService::install(httplib::Server& server) {
  using Handler = std::function<nlohmann::json(const httplib::Request&)>;
  auto wrap = [](Handler h, int ok_status = 200) {
    return [h = std::move(h), ok_status](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json out;
      try {
        out = h(req);
        res.status = ok_status;
      } catch (const ServiceError& e) {
        res.status = e.status();
        out = {{"error", e.what()}};
      } catch (const nlohmann::json::exception& e) {
        res.status = 400;
        out = {{"error", std::string("bad request body: ") + e.what()}};
      } catch (const std::invalid_argument& e) {
        res.status = 400;
        out = {{"error", e.what()}};
      } catch (const std::exception& e) {
        res.status = 500;
        out = {{"error", e.what()}};
      }
      res.set_content(out.dump(), "application/json");
    };
  };
  auto body = [](const httplib::Request& req) {
    return req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body);
  };

  server.Get("/v1/health", wrap([this](const httplib::Request&) { return health(); }));
  server.Post("/v1/sessions", wrap([this, body](const httplib::Request& r) { return create_session(body(r)); }, 201));
  server.Get(R"(/v1/sessions/([^/]+))",
             wrap([this](const httplib::Request& r) { return get_session(r.matches[1].str()); }));
  server.Post(R"(/v1/sessions/([^/]+)/propose)",
              wrap([this, body](const httplib::Request& r) { return propose(r.matches[1].str(), body(r)); }));
  server.Post(R"(/v1/sessions/([^/]+)/accept)",
              wrap([this, body](const httplib::Request& r) { return accept(r.matches[1].str(), body(r)); }));
  server.Post("/v1/restore", wrap([this, body](const httplib::Request& r) { return restore(body(r)); }));

  if (!options_.ui_dir.empty() && std::filesystem::is_directory(options_.ui_dir)) {
    server.set_mount_point("/ui", options_.ui_dir.string());
  } else {
    server.Get(R"(/ui/?)", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kPlaceholderUi, "text/html; charset=utf-8");
    });
  }
  server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_redirect("/ui/"); });
}

}  // namespace lacuna::service
