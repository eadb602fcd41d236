# Copyright 2026 The qtem Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Circuit quantization, cavity, electron-optics and qubit-assisted TEM toolkit."""

import json as _json

from ._qtem import *  # noqa: F401,F403
from ._qtem import __version__, constants_json, Error, ValidationError


def constants():
    """The constant table as a dict (SI values)."""
    return _json.loads(constants_json())
