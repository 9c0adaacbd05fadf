#pragma once

#include <string>
#include <vector>

namespace wbfuzz {

// One generated candidate test with its lineage. parent_example_ids is empty
// exactly when the program came from the initial (non-feedback) prompt.
struct TestProgram {
  std::string id;
  std::string opt_id;
  std::string code;
  int iteration = 0;
  std::vector<std::string> parent_example_ids;
  std::string source_prompt_hash;
};

}  // namespace wbfuzz
