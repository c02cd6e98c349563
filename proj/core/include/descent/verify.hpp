#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace descent {

// Built-in property suites runnable from the CLI; `all` is the union.
enum class Suite { first_step, limits, wrappers, kernels, schedules, all };

const char* to_string(Suite suite);
std::optional<Suite> suite_from_string(std::string_view name);

struct PropertyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<PropertyResult> verify_suite(Suite suite);

}  // namespace descent
