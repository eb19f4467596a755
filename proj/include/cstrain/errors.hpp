#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cstrain {

// Domain failure with a stable machine-readable name ("ZeroColumn",
// "Infeasible", ...). The CLI prints the name on stderr and exits 1.
class domain_error : public std::runtime_error {
public:
    domain_error(std::string name, const std::string& what)
        : std::runtime_error(name + ": " + what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

[[noreturn]] inline void fail(std::string name, const std::string& what) {
    throw domain_error(std::move(name), what);
}

}  // namespace cstrain
