#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bdg {

/// Insertion-ordered key/value map for block, line, and model parameters.
/// Values are kept as uninterpreted strings; callers parse them where needed.
class OrderedParams {
public:
    using Entry = std::pair<std::string, std::string>;

    OrderedParams() = default;
    OrderedParams(std::initializer_list<Entry> entries) : entries_(entries) {}

    /// Overwrites the existing value for `key` or appends a new entry.
    void set(std::string_view key, std::string_view value) {
        for (auto& e : entries_) {
            if (e.first == key) {
                e.second = value;
                return;
            }
        }
        entries_.emplace_back(std::string(key), std::string(value));
    }

    /// Appends without checking for duplicates. Used by tests that build
    /// deliberately invalid inputs; validate() reports duplicate keys.
    void append_unchecked(std::string_view key, std::string_view value) {
        entries_.emplace_back(std::string(key), std::string(value));
    }

    const std::string* get(std::string_view key) const {
        for (const auto& e : entries_) {
            if (e.first == key) return &e.second;
        }
        return nullptr;
    }

    bool contains(std::string_view key) const { return get(key) != nullptr; }

    void erase(std::string_view key) {
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (it->first == key) {
                entries_.erase(it);
                return;
            }
        }
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    const std::vector<Entry>& entries() const { return entries_; }

    bool operator==(const OrderedParams&) const = default;

private:
    std::vector<Entry> entries_;
};

} // namespace bdg
