// Copyright 2026 The Issue Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <httplib.h>

#include <fmt/format.h>

#include "triage/error.hpp"
#include "triage/service.hpp"

namespace triage::service {
namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()),
            {{"error", std::string(to_string(e.code()))}, {"message", e.what()}});
}

// Runs a handler, translating library and parse errors into JSON replies.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_json(res, 400, {{"error", "FormatError"}, {"message", e.what()}});
  }
}

std::optional<Day> day_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return parse_day(req.get_param_value(name));
}

json series_json(const eval::AccuracySeries& series) {
  json out = json::array();
  for (const auto& p : series) {
    out.push_back({{"day", format_day(p.day)},
                   {"accuracy", p.accuracy},
                   {"n_reports", p.n_reports}});
  }
  return out;
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kServiceUnavailable: return 503;
    case ErrorCode::kConflict: return 409;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kAssignmentImpossible: return 422;
    case ErrorCode::kIoError: return 500;
    default: return 400;
  }
}

void mount_routes(httplib::Server& server, Service& service,
                  const text::StopWords& default_stop_words) {
  server.Post("/assign", [&service](const httplib::Request& req,
                                    httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      AssignRequest request;
      request.report_id = body.at("report_id").get<std::string>();
      request.summary = body.value("summary", "");
      request.description = body.value("description", "");
      if (body.contains("opened_at") && !body["opened_at"].is_null()) {
        request.opened_at = parse_timestamp(body["opened_at"].get<std::string>());
      }
      request.explain = body.value("explain", false);
      const auto response = service.assign(request);
      json out = {{"report_id", response.report_id},
                  {"predicted_team", response.team.name()},
                  {"model_fingerprint", response.model_fingerprint},
                  {"explanation", nullptr}};
      if (response.explanation) out["explanation"] = explain::to_json(*response.explanation);
      send_json(res, 200, out);
    });
  });

  server.Post("/feedback", [&service](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      const auto closed_at =
          body.contains("closed_at") && !body["closed_at"].is_null()
              ? parse_timestamp(body["closed_at"].get<std::string>())
              : now_utc();
      const auto record =
          service.feedback(body.at("report_id").get<std::string>(),
                           TeamId(body.at("final_team").get<std::string>()),
                           closed_at);
      send_json(res, 200, to_json(record));
    });
  });

  server.Get("/accuracy", [&service](const httplib::Request& req,
                                     httplib::Response& res) {
    guarded(res, [&] {
      const auto status =
          service.accuracy(day_param(req, "from"), day_param(req, "to"));
      json alert = nullptr;
      if (status.alert) {
        alert = drift::to_json(*status.alert);
        alert["date"] = format_day(*status.alert_day);
      }
      send_json(res, 200,
                {{"series", series_json(status.series)},
                 {"alert", alert}});
    });
  });

  server.Get("/model", [&service](const httplib::Request&,
                                  httplib::Response& res) {
    send_json(res, 200, service.model_info());
  });

  server.Post("/admin/retrain", [&service, &default_stop_words](
                                    const httplib::Request& req,
                                    httplib::Response& res) {
    guarded(res, [&] {
      const auto body = json::parse(req.body);
      TrainJobConfig job;
      if (const auto current = service.current()) {
        job.spec = classify::parse_spec(current->descriptor);
        job.fit.seed = current->seed;
      }
      if (body.contains("model")) {
        job.spec = classify::parse_spec(body["model"].get<std::string>());
      }
      if (body.contains("seed")) job.fit.seed = body["seed"].get<std::uint64_t>();
      const auto as_of = body.contains("as_of")
                             ? parse_month(body["as_of"].get<std::string>())
                             : month_of(now_utc());
      const bool started = service.retrain_async(
          body.at("corpus").get<std::string>(), as_of, job, default_stop_words);
      if (!started) {
        send_json(res, 409, {{"error", "Conflict"},
                             {"message", "a retrain is already running"}});
        return;
      }
      send_json(res, 202, {{"status", "accepted"},
                           {"as_of", format_month(as_of)},
                           {"model", classify::to_string(job.spec)}});
    });
  });
}

}  // namespace triage::service
