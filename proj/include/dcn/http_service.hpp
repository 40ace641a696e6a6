#pragma once

// HTTP facade over SessionManager.
//
//   POST /session                         {"qubits": n, "ket": "01" | "amps": "..." | [...], "normalize": b, "seed": s}
//   POST /session/{id}/op                 {"op": "<statement>"} or the statement as text/plain
//   POST /session/{id}/undo | redo
//   GET  /session/{id}/state
//   GET  /session/{id}/render.svg?layout=<layout>
//   GET  /session/{id}/placement?layout=<layout>
//   GET  /session/{id}/separability?partition=P,Q[&order=q,...] | ?qubit=k
//   GET  /session/{id}/export
//   GET  /config
//
// Errors carry {"code", "message", "span"?}: 400 malformed request, 404 unknown session,
// 409 zero-probability outcome or timeline boundary, 422 invalid op, layout or partition.

#include <memory>
#include <string>

#include "dcn/session.hpp"

namespace dcn {

class HttpService {
 public:
  explicit HttpService(ServiceConfig config = {});
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds without listening; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);

  /// Serves until stop(). Returns false if not bound.
  bool listen();

  void stop();
  void wait_until_ready() const;

  SessionManager& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dcn
