#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace atlas {

/// Serves the files of one directory over HTTP. Static files only.
class StaticServer {
 public:
  explicit StaticServer(const std::filesystem::path& root);
  ~StaticServer();
  StaticServer(const StaticServer&) = delete;
  StaticServer& operator=(const StaticServer&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  void run();
  /// Blocks until run() is accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace atlas
