#include "monoslicer/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace monoslicer::log {

namespace {

std::shared_ptr<spdlog::logger> make() {
  auto logger = std::make_shared<spdlog::logger>("monoslicer", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("%^%l%$: %v");
  logger->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MONOSLICER_LOG_LEVEL")) {
    std::string_view v = env;
    if (v == "error") logger->set_level(spdlog::level::err);
    else if (v == "warn") logger->set_level(spdlog::level::warn);
    else if (v == "info") logger->set_level(spdlog::level::info);
    else if (v == "debug") logger->set_level(spdlog::level::debug);
    else logger->warn("ignoring MONOSLICER_LOG_LEVEL={} (expected error, warn, info or debug)", v);
  }
  return logger;
}

}  // namespace

std::shared_ptr<spdlog::logger> get() {
  static auto logger = make();
  return logger;
}

}  // namespace monoslicer::log
