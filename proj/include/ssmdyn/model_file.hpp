// Copyright 2026 The ssm-dyn Authors
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

#pragma once

#include <filesystem>
#include <string_view>

#include "ssmdyn/keyvalue.hpp"
#include "ssmdyn/liouville.hpp"
#include "ssmdyn/spin_ops.hpp"

// Model files describe a LiouvillianModel on a qubit register:
//
//   sites        = 4                      # required
//   hamiltonian  = 0.5 Z1 Z2 + X3         # optional, repeatable (summed)
//   lindblad     = 1.0 : Sx               # rate : operator, repeatable
//   kraus        = 1/3 : expi(1, Sx)      # weight : operator, repeatable
//   perturbation = 1.5 Z1 Z2 + 1.5 Z2 Z3 + I
//   strength     = 1                      # theta, default 1
//   scale        = 100                    # T, default 1
//
// Operator expressions are sums of products. A product is an optional real
// coefficient followed by factors separated by spaces or '*':
//   I            identity
//   X<k> Y<k> Z<k>  Pauli on site k (1-based)
//   Sx Sy Sz     collective spins, S = sum sigma / 2
//   Sp Sm        collective raising / lowering
//   expi(phi, A) exp(i phi A)
//   ( expr )     grouping
// Coefficients accept ratios such as 1/3.
namespace ssmdyn {

Operator parse_operator_expression(std::string_view expr, const SpinRegister& reg);

LiouvillianModel parse_model(const KeyValueFile& kv);
LiouvillianModel load_model(const std::filesystem::path& path);

}  // namespace ssmdyn
