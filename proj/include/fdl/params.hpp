#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace fdl {

/// String-keyed algorithm parameter record, stored as a JSON object so it
/// serializes into RunRecords and bench matrices unchanged. Typed getters
/// fall back to the given default when the key is absent.
class ParamSet {
public:
    ParamSet() : values_(nlohmann::json::object()) {}
    explicit ParamSet(nlohmann::json values) : values_(std::move(values)) {
        if (!values_.is_object()) values_ = nlohmann::json::object();
    }

    double number(const std::string& key, double def) const {
        auto it = values_.find(key);
        return it != values_.end() && it->is_number() ? it->get<double>() : def;
    }

    int integer(const std::string& key, int def) const {
        auto it = values_.find(key);
        return it != values_.end() && it->is_number() ? static_cast<int>(it->get<double>()) : def;
    }

    bool boolean(const std::string& key, bool def) const {
        auto it = values_.find(key);
        if (it == values_.end()) return def;
        if (it->is_boolean()) return it->get<bool>();
        if (it->is_number()) return it->get<double>() != 0.0;
        return def;
    }

    std::string str(const std::string& key, const std::string& def) const {
        auto it = values_.find(key);
        return it != values_.end() && it->is_string() ? it->get<std::string>() : def;
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    void set(const std::string& key, nlohmann::json value) { values_[key] = std::move(value); }

    const nlohmann::json& json() const { return values_; }

private:
    nlohmann::json values_;
};

} // namespace fdl
