#include "atlas/serve.hpp"

#include <httplib.h>

#include "atlas/error.hpp"

namespace atlas {

struct StaticServer::Impl {
  httplib::Server server;
};

StaticServer::StaticServer(const std::filesystem::path& root) : impl_(std::make_unique<Impl>()) {
  if (!std::filesystem::is_directory(root)) {
    throw Error(ErrorKind::Config, "serve directory '" + root.string() + "' does not exist");
  }
  if (!impl_->server.set_mount_point("/", root.string())) {
    throw Error(ErrorKind::IoFailure, "cannot serve '" + root.string() + "'");
  }
  impl_->server.set_file_extension_and_mimetype_mapping("json", "application/json");
  // The atlas page may be hosted elsewhere and fetch the bundle cross-origin.
  impl_->server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
}

StaticServer::~StaticServer() { stop(); }

int StaticServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::IoFailure, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorKind::IoFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void StaticServer::run() { impl_->server.listen_after_bind(); }

void StaticServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void StaticServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace atlas
