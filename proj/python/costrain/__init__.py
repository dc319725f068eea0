"""N-strain SIS coinfection dynamics: full compartmental system, replicator
reduction on the slow manifold, and invasion-fitness analysis."""

import json as _json

from ._costrain import *  # noqa: F401,F403
from ._costrain import __version__, run_report_json  # noqa: F401


def run_report(subcommand, scenario_path):
    """Runs a subcommand on a scenario file and returns the report as a dict."""
    return _json.loads(run_report_json(subcommand, scenario_path))
