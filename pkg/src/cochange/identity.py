"""Stable method identity.

A method is identified by the sha1 of (file path, enclosing type name,
method name, ordered parameter-type list). Renames therefore produce a new
identity (delete + add); this keeps ids pure functions of a snapshot and
reproducible across runs.
"""

import hashlib

from collections.abc import Sequence


def method_id(file_path: str, type_name: str, name: str, param_types: Sequence[str]) -> str:
    key = "|".join([file_path, type_name, name, ",".join(param_types)])
    return hashlib.sha1(key.encode("utf-8")).hexdigest()


def signature_key(type_name: str, name: str, param_types: Sequence[str]) -> str:
    """Identity minus the file path, used to pair methods across a file rename."""
    return "|".join([type_name, name, ",".join(param_types)])
