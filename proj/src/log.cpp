#include "rnmf/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace rnmf {

namespace {

void default_handler(std::string_view message) {
  std::cerr << "rnmf: warning: " << message << '\n';
}

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h = default_handler;
  return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  if (!handler) handler = default_handler;
  return std::exchange(handler_slot(), std::move(handler));
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  handler_slot()(message);
}

}  // namespace rnmf
