#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace expbasis {

// Small whitelisted arithmetic grammar used by JSON configs:
//   numbers, named variables, pi, e, + - * / ^, parentheses and
//   sin cos tan exp log sqrt abs tanh sinh cosh atan sign step min max.
// step(t) is 1 for t >= 0 and 0 otherwise.
class Expression {
public:
    static Expression parse(std::string_view source, std::vector<std::string> variables);

    // values must follow the order of the variables passed to parse().
    double operator()(std::span<const double> values) const;
    double operator()(double v) const { return (*this)(std::span<const double>(&v, 1)); }

    const std::string& source() const { return source_; }
    const std::vector<std::string>& variables() const { return variables_; }

    struct Node;

private:
    std::string source_;
    std::vector<std::string> variables_;
    std::shared_ptr<const Node> root_;
};

}  // namespace expbasis
