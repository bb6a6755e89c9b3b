#pragma once

#include <string>
#include <vector>

namespace sinklab::tinylmm {

enum class TokenRole { bos, visual, text };

std::string role_name(TokenRole role);
TokenRole role_from_name(const std::string& name);

// Partition of sequence positions into BOS / visual / text. Index 0 is
// always the single BOS token; it belongs to neither I_vis nor I_txt.
class TokenLayout {
public:
    TokenLayout() = default;
    explicit TokenLayout(std::vector<TokenRole> roles);

    static TokenLayout from_names(const std::vector<std::string>& names);

    int size() const { return static_cast<int>(roles_.size()); }
    TokenRole role(int i) const { return roles_[static_cast<std::size_t>(i)]; }
    bool is_visual(int i) const { return role(i) == TokenRole::visual; }
    bool is_text(int i) const { return role(i) == TokenRole::text; }

    const std::vector<int>& visual_indices() const { return visual_; }
    const std::vector<int>& text_indices() const { return text_; }
    const std::vector<TokenRole>& roles() const { return roles_; }

    // Generated tokens always join the text role.
    void push_text();

private:
    void rebuild_index_sets();

    std::vector<TokenRole> roles_;
    std::vector<int> visual_;
    std::vector<int> text_;
};

}  // namespace sinklab::tinylmm
