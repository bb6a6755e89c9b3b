#include "sinklab/tinylmm/layout.hpp"

#include <stdexcept>

namespace sinklab::tinylmm {

std::string role_name(TokenRole role) {
    switch (role) {
        case TokenRole::bos: return "bos";
        case TokenRole::visual: return "visual";
        case TokenRole::text: return "text";
    }
    throw std::logic_error("role_name: bad role");
}

TokenRole role_from_name(const std::string& name) {
    if (name == "bos") return TokenRole::bos;
    if (name == "visual") return TokenRole::visual;
    if (name == "text") return TokenRole::text;
    throw std::invalid_argument("unknown token role: \"" + name + "\"");
}

TokenLayout::TokenLayout(std::vector<TokenRole> roles) : roles_(std::move(roles)) {
    if (roles_.empty()) throw std::invalid_argument("TokenLayout: empty role list");
    if (roles_[0] != TokenRole::bos) throw std::invalid_argument("TokenLayout: index 0 must be bos");
    for (std::size_t i = 1; i < roles_.size(); ++i) {
        if (roles_[i] == TokenRole::bos) {
            throw std::invalid_argument("TokenLayout: bos allowed only at index 0");
        }
    }
    rebuild_index_sets();
}

TokenLayout TokenLayout::from_names(const std::vector<std::string>& names) {
    std::vector<TokenRole> roles;
    roles.reserve(names.size());
    for (const auto& n : names) roles.push_back(role_from_name(n));
    return TokenLayout(std::move(roles));
}

void TokenLayout::push_text() {
    roles_.push_back(TokenRole::text);
    text_.push_back(static_cast<int>(roles_.size()) - 1);
}

void TokenLayout::rebuild_index_sets() {
    visual_.clear();
    text_.clear();
    for (std::size_t i = 0; i < roles_.size(); ++i) {
        if (roles_[i] == TokenRole::visual) visual_.push_back(static_cast<int>(i));
        if (roles_[i] == TokenRole::text) text_.push_back(static_cast<int>(i));
    }
}

}  // namespace sinklab::tinylmm
