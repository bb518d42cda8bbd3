"""Core output dispatcher."""

import json


def pretty_print(data):
    print(json.dumps(data, indent=2, ensure_ascii=False))


def output(data, formatter=None, fmt="json"):
    """Print ``data`` as JSON, or through ``formatter`` for ``--format table``."""
    if fmt == "table" and formatter:
        print(formatter(data))
    else:
        pretty_print(data)
