#include "btca/service.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <variant>

#include <httplib.h>

#include "btca/error.hpp"

namespace btca {

namespace {

using ojson = nlohmann::ordered_json;

ServiceResponse error_response(int status, const char* code, const std::string& message) {
  ServiceResponse r;
  r.status = status;
  r.body = ojson{{"error", code}, {"message", message}};
  return r;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<Position> parse_session_position(std::string_view s) {
  if (s == "long") return Position::Long;
  if (s == "short") return Position::Short;
  return std::nullopt;
}

ojson record_json(const BacktestRecord& r) {
  ojson j;
  j["date"] = r.date.iso();
  j["close"] = r.close;
  j["position"] = to_string(r.position);
  j["agent_action"] = to_string(r.agent_action);
  j["final_recommendation"] = to_string(r.recommendation);
  j["position_after"] = to_string(r.position_after);
  j["reward"] = r.reward;
  j["cumulative_reward"] = r.cumulative_reward;
  j["cumulative_profit"] = r.cumulative_profit;
  return j;
}

struct DateRange {
  Date from, to;
};

// Resolves optional query bounds against the served dates [first, last].
std::variant<DateRange, ServiceResponse> resolve_range(const std::optional<std::string>& from,
                                                       const std::optional<std::string>& to, Date first,
                                                       Date last) {
  DateRange r{first, last};
  if (from) {
    auto d = Date::parse(*from);
    if (!d) return error_response(400, "InvalidDate", "cannot parse from=" + *from);
    r.from = *d;
  }
  if (to) {
    auto d = Date::parse(*to);
    if (!d) return error_response(400, "InvalidDate", "cannot parse to=" + *to);
    r.to = *d;
  }
  if (r.from > r.to || r.from < first || r.to > last)
    return error_response(404, "RangeUncovered",
                          r.from.iso() + " .. " + r.to.iso() + " is outside " + first.iso() + " .. " + last.iso());
  return r;
}

template <class Rows, class DateOf, class ToJson>
ServiceResponse series_response(const char* kind, const Rows& rows, DateOf date_of, ToJson to_json,
                                const std::optional<std::string>& from, const std::optional<std::string>& to) {
  if (rows.empty()) return error_response(404, "RangeUncovered", std::string("no ") + kind + " data loaded");
  auto range = resolve_range(from, to, date_of(rows.front()), date_of(rows.back()));
  if (auto* err = std::get_if<ServiceResponse>(&range)) return std::move(*err);
  const auto& r = std::get<DateRange>(range);
  ServiceResponse out;
  out.body = ojson::array();
  for (const auto& row : rows) {
    Date d = date_of(row);
    if (d >= r.from && d <= r.to) out.body.push_back(to_json(row));
  }
  return out;
}

}  // namespace

ServiceData ServiceData::load(const ServiceOptions& options) {
  ServiceData data;
  if (options.features.empty()) throw Error(ErrorCode::InvalidConfig, "service needs a feature table");
  data.features = load_feature_csv(options.features);
  if (!options.model.empty()) {
    data.model = load_model(options.model);
    if (data.model->params.shape().input != data.model->env.window * kFeatureCount)
      throw Error(ErrorCode::InvalidModelFile, "model input size does not match its window");
  }
  if (!options.backtest.empty()) data.backtest = read_backtest_csv(options.backtest);
  if (!options.prices.empty()) data.prices = load_price_csv(options.prices);
  if (!options.sentiment.empty()) data.sentiment = read_sentiment_csv(options.sentiment);
  return data;
}

SessionStore::SessionStore(std::filesystem::path file) : file_(std::move(file)), rng_(std::random_device{}()) {
  if (file_.empty() || !std::filesystem::exists(file_)) return;
  std::ifstream in(file_);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::UnparsableRow, file_.string() + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::UnparsableRow, file_.string() + ": expected an object");
  for (const auto& [id, entry] : j.items()) {
    auto pos = entry.is_object() && entry.contains("position") && entry["position"].is_string()
                   ? parse_session_position(entry["position"].get<std::string>())
                   : std::nullopt;
    if (!pos) throw Error(ErrorCode::UnparsableRow, file_.string() + ": bad session " + id);
    sessions_[id] = {*pos, entry.value("updated_at", std::string{})};
  }
}

Position SessionStore::position(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? Position::Short : it->second.position;
}

std::optional<SessionPosition> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) return std::nullopt;
  return it->second;
}

void SessionStore::set(const std::string& id, Position position) {
  std::lock_guard lock(mutex_);
  sessions_[id] = {position, utc_now()};
  persist();
}

std::string SessionStore::new_id() {
  std::lock_guard lock(mutex_);
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
                static_cast<unsigned long long>(rng_()));
  return buf;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionStore::persist() const {
  if (file_.empty()) return;
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [id, s] : sessions_) j[id] = {{"position", to_string(s.position)}, {"updated_at", s.updated_at}};
  auto tmp = file_;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << j.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, file_);
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)),
      data_(std::make_shared<const ServiceData>(ServiceData::load(options_))),
      sessions_(options_.sessions) {}

Service::Service(ServiceData data, ServiceOptions options)
    : options_(std::move(options)),
      data_(std::make_shared<const ServiceData>(std::move(data))),
      sessions_(options_.sessions) {}

std::shared_ptr<const ServiceData> Service::snapshot() const {
  std::lock_guard lock(data_mutex_);
  return data_;
}

ServiceResponse Service::recommendation(std::optional<std::string> session, std::optional<std::string> date) const {
  auto data = snapshot();
  ServiceResponse out;
  out.session_id = session.value_or(std::string{});
  if (!data->model) {
    auto r = error_response(409, "ModelNotLoaded", "no policy model is loaded");
    r.session_id = out.session_id;
    return r;
  }
  const auto& table = data->features;
  const auto& model = *data->model;
  const std::size_t window = model.env.window;
  if (table.empty()) return error_response(404, "DateUncovered", "feature table is empty");

  Date day = table.date(table.size() - 1);
  if (date) {
    auto d = Date::parse(*date);
    if (!d) return error_response(400, "InvalidDate", "cannot parse date=" + *date);
    day = *d;
  }
  auto idx = table.index_of(day);
  if (!idx || *idx < window) {
    auto r = error_response(404, "DateUncovered",
                            day.iso() + " is outside the served range " +
                                (table.size() > window ? table.date(window).iso() + " .. " +
                                                             table.date(table.size() - 1).iso()
                                                       : std::string("(empty)")));
    r.session_id = out.session_id;
    return r;
  }

  const Position position = session ? sessions_.position(*session) : Position::Short;
  auto obs = build_observation(table, *idx, window, model.normalizer);
  auto pass = forward(model.params, obs);
  const AgentAction action = pass.probs[1] > pass.probs[0] ? AgentAction::Buy : AgentAction::Sell;

  out.body["date"] = day.iso();
  out.body["agent_action"] = to_string(action);
  out.body["position"] = to_string(position);
  out.body["final_recommendation"] = to_string(final_recommendation(action, position));
  out.body["probs"] = ojson{{"sell", pass.probs[0]}, {"buy", pass.probs[1]}};
  return out;
}

ServiceResponse Service::put_position(std::optional<std::string> session, const std::string& body) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
  std::optional<Position> pos;
  if (j.is_object() && j.contains("position") && j["position"].is_string())
    pos = parse_session_position(j["position"].get<std::string>());
  if (!pos) {
    auto r = error_response(400, "InvalidPosition", "expected {\"position\": \"long\" | \"short\"}");
    r.session_id = session.value_or(std::string{});
    return r;
  }
  const std::string id = session ? *session : sessions_.new_id();
  sessions_.set(id, *pos);
  auto stored = sessions_.find(id);
  ServiceResponse out;
  out.session_id = id;
  out.body["session_id"] = id;
  out.body["position"] = to_string(*pos);
  out.body["updated_at"] = stored ? stored->updated_at : std::string{};
  return out;
}

ServiceResponse Service::series(const std::string& kind, std::optional<std::string> from,
                                std::optional<std::string> to) const {
  auto data = snapshot();
  const auto& table = data->features;
  std::vector<std::size_t> rows(table.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  auto row_date = [&](std::size_t i) { return table.date(i); };

  if (kind == "price") {
    if (data->prices) {
      return series_response(
          "price", data->prices->bars(), [](const PriceBar& b) { return b.date; },
          [](const PriceBar& b) {
            return ojson{{"date", b.date.iso()}, {"open", b.open},   {"high", b.high},
                         {"low", b.low},         {"close", b.close}, {"volume", b.volume}};
          },
          from, to);
    }
    return series_response(
        "price", rows, row_date,
        [&](std::size_t i) {
          return ojson{{"date", table.date(i).iso()}, {"close", table.value(i, 0)}, {"volume", table.value(i, 1)}};
        },
        from, to);
  }
  if (kind == "indicators") {
    return series_response(
        "indicators", rows, row_date,
        [&](std::size_t i) {
          return ojson{{"date", table.date(i).iso()}, {"sma", table.value(i, 2)}, {"ema", table.value(i, 3)},
                       {"rsi", table.value(i, 4)},    {"bmsb", table.value(i, 5)}};
        },
        from, to);
  }
  if (kind == "sentiment") {
    if (!data->sentiment.empty()) {
      return series_response(
          "sentiment", data->sentiment, [](const DailySentiment& s) { return s.date; },
          [](const DailySentiment& s) {
            return ojson{{"date", s.date.iso()},
                         {"weighted_score", s.weighted_score},
                         {"tweet_count", s.tweet_count},
                         {"raw_mean", s.raw_mean}};
          },
          from, to);
    }
    return series_response(
        "sentiment", rows, row_date,
        [&](std::size_t i) { return ojson{{"date", table.date(i).iso()}, {"weighted_score", table.value(i, 6)}}; },
        from, to);
  }
  if (kind == "backtest") {
    return series_response(
        "backtest", data->backtest, [](const BacktestRecord& r) { return r.date; }, record_json, from, to);
  }
  return error_response(400, "UnknownKind", "unknown series kind '" + kind + "'");
}

ServiceResponse Service::health() const {
  auto data = snapshot();
  ServiceResponse out;
  out.body["status"] = "ok";
  out.body["model_loaded"] = data->model.has_value();
  out.body["feature_rows"] = data->features.size();
  if (!data->features.empty()) {
    out.body["first_date"] = data->features.date(0).iso();
    out.body["last_date"] = data->features.date(data->features.size() - 1).iso();
  }
  out.body["backtest_rows"] = data->backtest.size();
  out.body["sessions"] = sessions_.size();
  return out;
}

ServiceResponse Service::reload() {
  if (options_.features.empty()) return error_response(409, "ReloadUnavailable", "service was not started from files");
  try {
    auto fresh = std::make_shared<const ServiceData>(ServiceData::load(options_));
    std::lock_guard lock(data_mutex_);
    data_ = std::move(fresh);
  } catch (const Error& e) {
    return error_response(500, "ReloadFailed", e.what());
  }
  return health();
}

void Service::bind(httplib::Server& server) {
  auto session_of = [](const httplib::Request& req) -> std::optional<std::string> {
    if (!req.has_header("X-Session-Id")) return std::nullopt;
    auto v = req.get_header_value("X-Session-Id");
    if (v.empty()) return std::nullopt;
    return v;
  };
  auto param = [](const httplib::Request& req, const char* name) -> std::optional<std::string> {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
  };
  auto send = [](httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    if (!r.session_id.empty()) res.set_header("X-Session-Id", r.session_id);
    res.set_content(r.body.dump(), "application/json; charset=utf-8");
  };

  server.Get("/api/recommendation", [=, this](const httplib::Request& req, httplib::Response& res) {
    auto session = session_of(req);
    // A fresh id is issued but not stored, so the read stays side-effect free.
    auto r = recommendation(session, param(req, "date"));
    if (!session) r.session_id = sessions_.new_id();
    send(res, r);
  });
  server.Put("/api/position", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, put_position(session_of(req), req.body));
  });
  server.Get(R"(/api/series/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, series(req.matches[1].str(), param(req, "from"), param(req, "to")));
  });
  server.Get("/api/health", [=, this](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  server.Post("/api/admin/reload", [=, this](const httplib::Request&, httplib::Response& res) { send(res, reload()); });
  if (!options_.static_dir.empty()) server.set_mount_point("/", options_.static_dir.string());
  server.set_exception_handler([=](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_response(500, "Internal", what));
  });
}

}  // namespace btca
