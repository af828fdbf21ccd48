// Copyright 2026 The cosup Authors
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

#include <doctest.h>

#include "network_checks.hpp"

using namespace cosup;
using namespace cosup::testing;

namespace {

void expect_small(const GradCheckResult& r) {
  INFO(r.worst);
  CHECK(r.checked >= 100);
  CHECK(r.max_relative_error < 1e-3);
}

}  // namespace

TEST_CASE("generator gradients match central differences") {
  expect_small(gradcheck_generator(toy_net(), 150, 1));
  expect_small(gradcheck_generator(toy_net(64, 3, 4), 120, 2));
}

TEST_CASE("discriminator gradients match central differences") {
  expect_small(gradcheck_discriminator(toy_net(), 150, 3));
  expect_small(gradcheck_discriminator_input(toy_net(), 120, 4));
}

TEST_CASE("classifier gradients match central differences") {
  expect_small(gradcheck_classifier(toy_net(), 150, 5));
  expect_small(gradcheck_classifier(toy_net(128, 3, 4), 120, 6));
}

TEST_CASE("generator gradient flows through the discriminator") {
  expect_small(gradcheck_generator_through_discriminator(toy_net(), 150, 7));
}
