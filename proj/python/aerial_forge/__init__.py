# SPDX-FileCopyrightText: Copyright (c) 2026 The aerial-forge Authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the aerial-forge receiver runtime.

Engine blobs (.aerb), golden vectors (.aergv), datasets (.aeds) and
bank.yaml are read and written by the C++ core; this package wraps it.
"""

from ._core import (
    AerialForgeError,
    Engine,
    EngineBuilder,
    EngineDefinition,
    GoldenVectors,
    ModelBank,
    decompose_prbs,
    estimate_noise_var,
    format_bank_manifest,
    generate_dataset,
    generate_slot,
    load_bank,
    load_engine,
    load_engine_file,
    load_golden_file,
    ls_estimate,
    make_engine,
    make_golden,
    mmse_estimate,
    default_prb_sizes,
    default_snr_grid,
    parse_bank_manifest,
    parse_golden,
    parse_snr_spec,
    read_dataset,
    reference_cnn,
    run_cli,
    run_sweep,
    serialize_engine,
    tdl_max_excess_delay,
    verify_golden,
    write_reference_bank,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
