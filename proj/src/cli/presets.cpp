// Copyright 2026 The cpestab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <json.hpp>

#include "cpe/cli.hpp"

namespace cpe::cli {
namespace {

struct Embedded {
  const char* name;
  const char* text;
};

constexpr Embedded kEmbedded[] = {
#include "cpe_presets.inc"
};

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const Embedded& e : kEmbedded) {
      const auto j = nlohmann::json::parse(e.text, nullptr, false);
      std::string desc;
      if (j.is_object() && j.contains("description") && j["description"].is_string())
        desc = j["description"].get<std::string>();
      out.push_back({e.name, desc, e.text});
    }
    return out;
  }();
  return list;
}

const PresetInfo* find_preset(const std::string& name) {
  for (const PresetInfo& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace cpe::cli
