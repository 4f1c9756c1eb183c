from schema.forms import ScenarioForm
from schema.report import Report, load_report, report_from_json
from schema.scenario import load_scenario, scenario_from_json

__all__ = ['ScenarioForm',
           'Report',
           'load_report',
           'load_scenario',
           'report_from_json',
           'scenario_from_json',
           ]
