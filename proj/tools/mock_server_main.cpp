#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "mock_endpoint.hpp"

namespace {
volatile std::sig_atomic_t stop_requested = 0;
void handle_signal(int) { stop_requested = 1; }
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic OpenAI-compatible mock endpoint"};
  int port = 8700;
  app.add_option("--port", port, "Port to listen on (127.0.0.1)");
  CLI11_PARSE(app, argc, argv);

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  bento::MockEndpoint endpoint;
  endpoint.start(port);
  std::cout << "mock endpoint listening on " << endpoint.base_url() << "\n";
  while (!stop_requested) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  endpoint.stop();
  std::cout << "served " << endpoint.request_count() << " requests\n";
  return 0;
}
