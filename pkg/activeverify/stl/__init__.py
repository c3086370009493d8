# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from .formula import AbsPredicate, Always, And, Eventually, Not, Or, Predicate, StlFormula
from .parser import format_formula, parse_formula
from .trace import Trace
from .robustness import (
    RobustnessMeasurement,
    boolean_semantics,
    boolean_signal,
    conjunction_robustness,
    robustness,
    robustness_signal,
)
from .presets import PRESET_NAMES, conjunction_parts, preset_text, resolve_formula
