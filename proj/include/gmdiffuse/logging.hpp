#pragma once

#include <memory>
#include <utility>

#include <spdlog/spdlog.h>

namespace gmdiffuse::log {

/// Shared stderr logger. Level comes from GMDIFFUSE_LOG (error, info,
/// debug); the default is error.
std::shared_ptr<spdlog::logger> logger();

/// Re-reads GMDIFFUSE_LOG.
void configure_from_env();

template <typename... Args>
void debug(fmt::format_string<Args...> fmt, Args&&... args) {
  logger()->debug(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
  logger()->info(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void warn(fmt::format_string<Args...> fmt, Args&&... args) {
  logger()->warn(fmt, std::forward<Args>(args)...);
}

}  // namespace gmdiffuse::log
