#pragma once

#include <string>

#include "bba/victim.hpp"

namespace bba {

/// HTTP client for a remote victim serving POST /v1/logits with body
/// {"sequences": [[int,...],...]} and reply {"logits": [[float,...],...]},
/// response order matching the request. Any transport failure, non-200
/// status, malformed body or length mismatch raises ProtocolError.
class RemoteVictim : public Victim {
 public:
  explicit RemoteVictim(std::string base_url, int timeout_seconds = 10);
  std::vector<Logits> score(std::span<const Sequence> batch) override;

 private:
  std::string base_url_;
  int timeout_seconds_;
};

}  // namespace bba
