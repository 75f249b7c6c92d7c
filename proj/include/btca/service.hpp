#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "btca/backtest.hpp"
#include "btca/market_data.hpp"
#include "btca/policy.hpp"
#include "btca/sentiment.hpp"
#include "btca/trading_env.hpp"

namespace httplib {
class Server;
}

namespace btca {

struct ServiceOptions {
  std::filesystem::path model;
  std::filesystem::path features;
  std::filesystem::path backtest;    // backtest.csv, optional
  std::filesystem::path prices;      // optional, adds OHLC to the price series
  std::filesystem::path sentiment;   // optional, daily sentiment CSV
  std::filesystem::path sessions;    // optional JSON file for session persistence
  std::filesystem::path static_dir;  // optional, served at /
};

/// Immutable snapshot of everything the read endpoints serve.
struct ServiceData {
  std::optional<PolicyModel> model;
  FeatureTable features;
  std::vector<BacktestRecord> backtest;
  std::optional<PriceSeries> prices;
  std::vector<DailySentiment> sentiment;

  static ServiceData load(const ServiceOptions& options);
};

struct SessionPosition {
  Position position = Position::Short;
  std::string updated_at;  // UTC, ISO-8601
};

/// Per-session positions, optionally mirrored to a JSON file after every write.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path file = {});

  /// Short for sessions that never stored a position.
  Position position(const std::string& id) const;
  std::optional<SessionPosition> find(const std::string& id) const;
  void set(const std::string& id, Position position);
  std::string new_id();
  std::size_t size() const;

 private:
  void persist() const;

  std::filesystem::path file_;
  mutable std::mutex mutex_;
  std::map<std::string, SessionPosition> sessions_;
  std::mt19937_64 rng_;
};

struct ServiceResponse {
  int status = 200;
  nlohmann::ordered_json body;
  std::string session_id;  // echoed as X-Session-Id when non-empty
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  /// Serves an already loaded snapshot; reload re-reads `options` if set.
  Service(ServiceData data, ServiceOptions options = {});

  ServiceResponse recommendation(std::optional<std::string> session, std::optional<std::string> date) const;
  ServiceResponse put_position(std::optional<std::string> session, const std::string& body);
  ServiceResponse series(const std::string& kind, std::optional<std::string> from, std::optional<std::string> to) const;
  ServiceResponse health() const;
  ServiceResponse reload();

  SessionStore& sessions() { return sessions_; }
  std::shared_ptr<const ServiceData> snapshot() const;

  /// Registers every route on `server`.
  void bind(httplib::Server& server);

 private:
  ServiceOptions options_;
  mutable std::mutex data_mutex_;
  std::shared_ptr<const ServiceData> data_;
  SessionStore sessions_;
};

}  // namespace btca
