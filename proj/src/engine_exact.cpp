#include "engine_impl.hpp"

namespace spliteq {
template class Engine<mpq_class>;
}  // namespace spliteq
