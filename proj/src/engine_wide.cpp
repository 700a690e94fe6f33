#include "engine_impl.hpp"

namespace spliteq {
template class Engine<mpf_class>;
}  // namespace spliteq

#include <mutex>

namespace spliteq {

void ensure_wide_precision() {
  static std::once_flag once;
  std::call_once(once, [] { mpf_set_default_prec(kWideBits); });
}

namespace {
struct WideInit {
  WideInit() { ensure_wide_precision(); }
} wide_init;
}  // namespace

}  // namespace spliteq
