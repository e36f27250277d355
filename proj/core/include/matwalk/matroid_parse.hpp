#pragma once

#include <string_view>

#include "matwalk/matroid.hpp"

namespace matwalk {

// JSON schema, "type" selects the family:
//   {"type":"uniform","n":N,"r":R}
//   {"type":"partition","blocks":[[..],..],"caps":[..]}
//   {"type":"graphic","vertices":V,"edges":[[u,v],..]}
//   {"type":"linear","field":P,"matrix":[[..],..]}     columns are the elements
//   {"type":"truncation","k":K,"inner":<spec>}
//   {"type":"contract","set":[..],"inner":<spec>}
//   {"type":"delete","set":[..],"inner":<spec>}
//   {"type":"dual","inner":<spec>}
// throws input_error naming the JSON pointer of the offending field
Matroid parse_matroid(std::string_view json_text);

}  // namespace matwalk
