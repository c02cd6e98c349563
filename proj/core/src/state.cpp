#include "descent/state.hpp"

namespace descent {

StateBox::StateBox() : ptr_(std::make_unique<OptimizerState>()) {}

StateBox::StateBox(OptimizerState inner)
    : ptr_(std::make_unique<OptimizerState>(std::move(inner))) {}

StateBox::StateBox(const StateBox& other)
    : ptr_(std::make_unique<OptimizerState>(*other.ptr_)) {}

StateBox& StateBox::operator=(const StateBox& other) {
    if (this != &other) ptr_ = std::make_unique<OptimizerState>(*other.ptr_);
    return *this;
}

StateBox::StateBox(StateBox&&) noexcept = default;
StateBox& StateBox::operator=(StateBox&&) noexcept = default;
StateBox::~StateBox() = default;

OptimizerState& StateBox::get() { return *ptr_; }
const OptimizerState& StateBox::get() const { return *ptr_; }

}  // namespace descent
