#include "bba/remote_victim.hpp"

#include <httplib.h>

#include <json.hpp>

#include "bba/errors.hpp"

namespace bba {

RemoteVictim::RemoteVictim(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {}

std::vector<Logits> RemoteVictim::score(std::span<const Sequence> batch) {
  nlohmann::json body;
  body["sequences"] = nlohmann::json::array();
  for (const Sequence& s : batch) body["sequences"].push_back(s);

  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_seconds_, 0);
  client.set_read_timeout(timeout_seconds_, 0);

  const httplib::Result res =
      client.Post("/v1/logits", body.dump(), "application/json");
  if (!res) {
    throw ProtocolError("remote victim unreachable: " + base_url_);
  }
  if (res->status != 200) {
    throw ProtocolError("remote victim returned status " +
                        std::to_string(res->status));
  }

  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("remote victim reply is not JSON: ") +
                        e.what());
  }

  std::vector<Logits> out;
  try {
    out = reply.at("logits").get<std::vector<Logits>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("remote victim reply malformed: ") +
                        e.what());
  }
  if (out.size() != batch.size()) {
    throw ProtocolError("remote victim reply length mismatch");
  }
  return out;
}

}  // namespace bba
