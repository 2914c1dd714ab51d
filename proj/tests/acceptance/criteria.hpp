// Copyright 2026 The Lacuna Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef LACUNA_TESTS_ACCEPTANCE_CRITERIA_HPP_
#define LACUNA_TESTS_ACCEPTANCE_CRITERIA_HPP_

#include <functional>
#include <string>
#include <vector>

namespace lacuna::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;  // measured numbers, one line
};

struct Criterion {
  int number;
  std::string title;
  std::function<Outcome()> run;
};

// Criteria 1-4 and 8-10: correctness contracts.
std::vector<Criterion> contract_criteria();
// Criteria 5-7: scaled-down training experiments on generated corpora.
std::vector<Criterion> experiment_criteria();

}  // namespace lacuna::acceptance

#endif  // LACUNA_TESTS_ACCEPTANCE_CRITERIA_HPP_
