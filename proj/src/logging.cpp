#include "gmdiffuse/logging.hpp"

#include <cstdlib>
#include <mutex>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace gmdiffuse::log {
namespace {

spdlog::level::level_enum level_from_env() {
  const char* raw = std::getenv("GMDIFFUSE_LOG");
  if (raw == nullptr) return spdlog::level::err;
  const std::string_view v(raw);
  if (v == "debug") return spdlog::level::debug;
  if (v == "info") return spdlog::level::info;
  return spdlog::level::err;
}

}  // namespace

std::shared_ptr<spdlog::logger> logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> instance;
  std::call_once(once, [] {
    instance = spdlog::stderr_color_mt("gmdiffuse");
    instance->set_pattern("[%l] %v");
    instance->set_level(level_from_env());
  });
  return instance;
}

void configure_from_env() { logger()->set_level(level_from_env()); }

}  // namespace gmdiffuse::log
