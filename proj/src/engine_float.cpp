#include "engine_impl.hpp"

namespace spliteq {
template class Engine<double>;
}  // namespace spliteq
