#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace monoslicer::log {

/// stderr logger at the level named by MONOSLICER_LOG_LEVEL
/// (error, warn, info, debug; default warn). Safe to call repeatedly.
std::shared_ptr<spdlog::logger> get();

}  // namespace monoslicer::log
