#include "rts/tensor.hpp"

namespace rts {
namespace {
std::atomic<std::uint64_t> g_op_count{0};
}

std::uint64_t tensor_op_count() { return g_op_count.load(std::memory_order_relaxed); }
void reset_tensor_op_count() { g_op_count.store(0, std::memory_order_relaxed); }
void bump_tensor_op_count() { g_op_count.fetch_add(1, std::memory_order_relaxed); }

}  // namespace rts
