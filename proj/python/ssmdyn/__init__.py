# Copyright 2026 The ssm-dyn Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Steady-state manifold projections and effective dynamics."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_scenario_json, validate_scenario_json


def _params(params):
    return {str(k): str(v) for k, v in (params or {}).items()}


def validate_scenario(scenario, params=None, full_scale=False):
    """Model-level checks for a named scenario; returns the report as a dict."""
    return _json.loads(validate_scenario_json(scenario, _params(params), full_scale))


def run_scenario(scenario, params=None, full_scale=False, out_dir=None):
    """Checks and sweeps for a named scenario; returns the report as a dict.

    With out_dir, the CSV/JSON sweep files and the manifest are written too.
    """
    return _json.loads(run_scenario_json(scenario, _params(params), full_scale,
                                         None if out_dir is None else str(out_dir)))
